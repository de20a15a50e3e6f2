use super::{solve_point, EffectiveParams, HilbertDims, QuantumError};

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceOptions {
    pub rel_tol: f64,
    pub max_dims: HilbertDims,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_dims: HilbertDims {
                n_cav: 12,
                n_mech: 16,
            },
        }
    }
}

/// Grows the truncation one level at a time, alternating cavity and
/// mechanics, and returns the first dims whose `g2` is unchanged (to
/// `rel_tol`) by both the next cavity step and the following mechanical step.
pub fn converge_dims(
    params: &EffectiveParams,
    start: HilbertDims,
    opts: ConvergenceOptions,
) -> Result<HilbertDims, QuantumError> {
    start.validate()?;
    if !(opts.rel_tol > 0.0) {
        return Err(QuantumError::InvalidParams(format!(
            "rel_tol = {} must be > 0",
            opts.rel_tol
        )));
    }
    let g2_at =
        |dims: HilbertDims| -> Result<f64, QuantumError> { Ok(solve_point(params, dims)?.1.g2b) };

    let mut history: Vec<(HilbertDims, f64)> = vec![(start, g2_at(start)?)];
    let mut grow_cavity = true;
    let mut last_change = f64::INFINITY;
    loop {
        let (current, _) = *history.last().expect("non-empty");
        let can_cav = current.n_cav < opts.max_dims.n_cav;
        let can_mech = current.n_mech < opts.max_dims.n_mech;
        let next = match (grow_cavity, can_cav, can_mech) {
            (_, false, false) => {
                return Err(QuantumError::NotConverged {
                    last: current,
                    rel_change: last_change,
                })
            }
            (true, true, _) | (false, true, false) => HilbertDims {
                n_cav: current.n_cav + 1,
                ..current
            },
            _ => HilbertDims {
                n_mech: current.n_mech + 1,
                ..current
            },
        };
        grow_cavity = next.n_cav == current.n_cav;
        let g2 = g2_at(next)?;
        let (_, prev) = *history.last().expect("non-empty");
        last_change = (g2 - prev).abs() / prev.abs();
        history.push((next, g2));

        // The last two steps must have grown different modes and both be small.
        let k = history.len();
        if k >= 3 {
            let (d0, g0) = history[k - 3];
            let (d1, g1) = history[k - 2];
            let (d2, g2) = history[k - 1];
            let both_modes = (d1.n_cav != d0.n_cav) != (d2.n_cav != d1.n_cav);
            let small = |x: f64, y: f64| (y - x).abs() <= opts.rel_tol * x.abs();
            if both_modes && small(g0, g1) && small(g1, g2) {
                return Ok(d0);
            }
        }
    }
}

//! Sweep presets reproducing the figure panels of the blockade study.
//!
//! Captions fix every parameter except the swept axes of 2(a)-(d) and
//! 4(a)-(d), whose plotted ranges are chosen here.

use super::{Interval, SampleMode, SweepRanges};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePreset {
    pub name: &'static str,
    pub ranges: SweepRanges,
    pub mode: SampleMode,
    pub n: usize,
}

pub const PRESET_NAMES: [&str; 15] = [
    "2a", "2b", "2c", "2d", "4a", "4b", "4c", "4d", "6a", "6b", "6c", "6d", "7a", "7b", "7c",
];

const LINE: usize = 41;
const MAP: usize = LINE * LINE;
const SCATTER: usize = 500;

fn ranges(delta: Interval, coupling: Interval, eps_a: Interval, eps_b: Interval) -> SweepRanges {
    SweepRanges {
        delta,
        coupling,
        eps_a,
        eps_b,
        ..SweepRanges::default()
    }
}

pub fn figure_preset(name: &str) -> Option<FigurePreset> {
    use Interval as I;
    let fixed = I::fixed;
    let detuning = I::new(-0.1, 0.1);
    let drive = I::new(0.0, 0.005);
    let coupling_map = I::new(0.0, 0.4);
    let (r, mode, n) = match name {
        "2a" => (
            ranges(fixed(0.0), fixed(0.2), drive, fixed(0.002)),
            SampleMode::Grid,
            LINE,
        ),
        "2b" => (
            ranges(fixed(0.0), fixed(0.2), fixed(0.002), drive),
            SampleMode::Grid,
            LINE,
        ),
        "2c" => (
            ranges(fixed(0.0), I::new(0.1, 0.35), fixed(0.002), fixed(0.002)),
            SampleMode::Grid,
            LINE,
        ),
        "2d" => (
            ranges(detuning, fixed(0.2), fixed(0.002), fixed(0.002)),
            SampleMode::Grid,
            LINE,
        ),
        "4a" => (
            ranges(detuning, coupling_map, fixed(0.002), fixed(0.002)),
            SampleMode::Grid,
            MAP,
        ),
        "4b" => (
            ranges(fixed(0.0), coupling_map, fixed(0.002), drive),
            SampleMode::Grid,
            MAP,
        ),
        "4c" => (
            ranges(detuning, fixed(0.2), fixed(0.002), drive),
            SampleMode::Grid,
            MAP,
        ),
        "4d" => (
            ranges(fixed(0.0), coupling_map, drive, fixed(0.002)),
            SampleMode::Grid,
            MAP,
        ),
        "6a" => (
            ranges(detuning, fixed(0.2), fixed(0.002), fixed(0.0015)),
            SampleMode::Grid,
            LINE,
        ),
        "6b" => (
            ranges(fixed(0.02), I::new(0.1, 0.3), fixed(0.002), fixed(0.0015)),
            SampleMode::Grid,
            LINE,
        ),
        "6c" => (
            ranges(fixed(0.02), fixed(0.2), fixed(0.002), I::new(0.001, 0.003)),
            SampleMode::Grid,
            LINE,
        ),
        "6d" => (
            ranges(
                detuning,
                I::new(0.1, 0.3),
                fixed(0.002),
                I::new(0.001, 0.003),
            ),
            SampleMode::UniformRandom,
            SCATTER,
        ),
        "7a" => (
            ranges(fixed(0.005), fixed(0.3), fixed(0.002), I::new(0.001, 0.003)),
            SampleMode::Grid,
            LINE,
        ),
        "7b" => (
            ranges(fixed(0.005), I::new(0.25, 0.35), fixed(0.002), fixed(0.002)),
            SampleMode::Grid,
            LINE,
        ),
        "7c" => (
            ranges(
                I::new(-0.005, 0.005),
                I::new(0.29, 0.31),
                fixed(0.002),
                I::new(0.0018, 0.0022),
            ),
            SampleMode::UniformRandom,
            SCATTER,
        ),
        _ => return None,
    };
    let name = PRESET_NAMES.iter().find(|p| **p == name).copied()?;
    Some(FigurePreset {
        name,
        ranges: r,
        mode,
        n,
    })
}

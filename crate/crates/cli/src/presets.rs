//! Canned sweeps that regenerate the standard figure data sets.

use compass_core::{Error, PhaseSpaceGrid, Result};

use crate::spec::{AlphaSpec, Format, Quantity, StateSelector, SweepSpec};

const PRESETS: u32 = 11;

fn base(quantity: Quantity, state: StateSelector, alpha: AlphaSpec) -> SweepSpec {
    SweepSpec {
        quantity,
        state,
        alpha,
        grid: None,
        output: None,
        format: Format::Csv,
        cutoff: None,
        angle: 0.0,
        n_max: None,
    }
}

fn canonical(l: &[u8]) -> StateSelector {
    StateSelector::Canonical {
        l: l.to_vec(),
        beta_ratio: None,
    }
}

fn ratio(l: &[u8], r: [f64; 2]) -> StateSelector {
    StateSelector::Canonical {
        l: l.to_vec(),
        beta_ratio: Some(r),
    }
}

fn range(start: f64, stop: f64, count: usize) -> AlphaSpec {
    AlphaSpec::Range {
        start,
        stop,
        count,
        arg: 0.0,
    }
}

fn with_grid(mut s: SweepSpec, grid: PhaseSpaceGrid) -> SweepSpec {
    s.grid = Some(grid);
    s
}

/// Named sweeps for figure `n`; file stems are the names.
pub fn paper_figure(n: u32) -> Result<Vec<(String, SweepSpec)>> {
    let all = [0, 1, 2, 3];
    let fixed = |a: f64| AlphaSpec::Fixed([a, 0.0]);
    let sq = |h: f64, n: usize| PhaseSpaceGrid::square(h, n).expect("static grid");
    let named = |name: &str, s: SweepSpec| (name.to_string(), s);
    let out = match n {
        1 => (0u8..4)
            .map(|l| {
                named(
                    &format!("wigner_l{l}"),
                    with_grid(
                        base(Quantity::Wigner, canonical(&[l]), fixed(2.0)),
                        sq(4.0, 201),
                    ),
                )
            })
            .collect(),
        2 => vec![named(
            "negativity_beta_half",
            base(
                Quantity::Negativity,
                ratio(&all, [0.0, 0.5]),
                range(0.25, 4.0, 16),
            ),
        )],
        3 => vec![named(
            "negativity",
            base(Quantity::Negativity, canonical(&all), range(0.25, 4.0, 16)),
        )],
        4 => vec![named(
            "stats",
            base(Quantity::Stats, canonical(&all), range(0.1, 4.0, 40)),
        )],
        5 => vec![
            named(
                "stats",
                base(Quantity::Stats, canonical(&all), range(0.1, 6.0, 60)),
            ),
            named("pnd", base(Quantity::Pnd, canonical(&all), fixed(5.0))),
        ],
        6 => vec![named(
            "stats_beta_double",
            base(
                Quantity::Stats,
                ratio(&all, [0.0, 2.0]),
                range(0.1, 4.0, 40),
            ),
        )],
        7 => vec![
            named(
                "squeezing",
                base(Quantity::Squeezing, canonical(&all), range(0.1, 4.0, 40)),
            ),
            named(
                "squeezing_beta_double",
                base(
                    Quantity::Squeezing,
                    ratio(&all, [0.0, 2.0]),
                    range(0.1, 4.0, 40),
                ),
            ),
            named(
                "quadrature",
                base(Quantity::Quadrature, canonical(&all), fixed(2.0)),
            ),
            named(
                "quadrature_beta_double",
                base(Quantity::Quadrature, ratio(&all, [0.0, 2.0]), fixed(2.0)),
            ),
        ],
        8 => vec![
            named(
                "tiles",
                base(Quantity::Tiles, canonical(&all), range(2.0, 5.0, 4)),
            ),
            named(
                "wigner_zoom",
                with_grid(
                    base(Quantity::Wigner, canonical(&[0]), fixed(4.0)),
                    sq(1.0, 201),
                ),
            ),
        ],
        9 => vec![
            named(
                "sensitivity",
                base(Quantity::Sensitivity, canonical(&all), fixed(4.0)),
            ),
            named(
                "sensitivity_beta_double",
                base(Quantity::Sensitivity, ratio(&[0], [0.0, 2.0]), fixed(4.0)),
            ),
        ],
        10 => vec![named(
            "mean_photon",
            base(Quantity::Stats, canonical(&all), range(0.1, 4.0, 40)),
        )],
        11 => vec![named(
            "negativity_vs_l",
            base(
                Quantity::NegativityVsL,
                canonical(&all),
                AlphaSpec::List {
                    values: vec![1.0, 4.0],
                    arg: 0.0,
                },
            ),
        )],
        _ => {
            return Err(Error::InvalidSpec(format!(
                "unknown figure {n} (expected 1..={PRESETS})"
            )))
        }
    };
    Ok(out)
}

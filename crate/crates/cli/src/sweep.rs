//! Evaluate a [`SweepSpec`] into a table and write it out.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use compass_core::grid::fmt_f64;
use compass_core::sensitivity::{default_sensitivity_grid, sensitivity_map};
use compass_core::squeezing::{
    hong_mandel_s, quadrature_density, quadrature_variances, QuadratureAngle,
};
use compass_core::statistics::{pnd_table, stat_report};
use compass_core::wigner::{default_negativity_grid, negative_volume, tile_metrics, wigner_grid};
use compass_core::{par, Error, GcsParams, Result, ScalarField, WIGNER_PREFACTOR};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::spec::{Format, Quantity, StateTemplate, SweepSpec};

pub const WIGNER_CONVENTION: &str =
    "W(z) = (2/pi) <D(z) P D(z)^dag>, z = x + iy, a = x + ip, vacuum W = (2/pi) exp(-2|z|^2)";

const PREFIX: [&str; 8] = [
    "alpha_re", "alpha_im", "beta_re", "beta_im", "theta", "phi", "chi", "l",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<Option<f64>>,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub quantity: Quantity,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub metadata: Vec<(String, String)>,
    /// The single field of a one-state wigner or sensitivity sweep.
    pub field: Option<ScalarField>,
}

pub fn columns(q: Quantity) -> &'static [&'static str] {
    match q {
        Quantity::Wigner => &["x", "y", "W"],
        Quantity::Sensitivity => &["delta_x", "delta_p", "F"],
        Quantity::Negativity | Quantity::NegativityVsL => &["delta", "delta_err"],
        Quantity::Stats => &[
            "n_mean",
            "Q",
            "g2",
            "A3",
            "s_x",
            "s_y",
            "var_x",
            "var_y",
            "hong_mandel_4",
        ],
        Quantity::Squeezing => &[
            "theta_prime",
            "var_x",
            "var_y",
            "s_x",
            "s_y",
            "hong_mandel_2",
            "hong_mandel_4",
            "hong_mandel_6",
        ],
        Quantity::Pnd => &["n", "P"],
        Quantity::Quadrature => &["x", "P"],
        Quantity::Tiles => &[
            "center_value",
            "center_sign",
            "first_zero_x",
            "first_zero_y",
            "tile_area",
            "predicted_area",
        ],
    }
}

struct Point {
    template: StateTemplate,
    alpha: Complex64,
}

#[derive(Default)]
struct PointOut {
    rows: Vec<(Vec<Option<f64>>, Option<&'static str>)>,
    quad_error: Option<f64>,
    field: Option<ScalarField>,
}

fn prefix(pt: &Point) -> Vec<Option<f64>> {
    let b = pt.template.beta_for(pt.alpha);
    let ph = pt.template.phases;
    vec![
        Some(pt.alpha.re),
        Some(pt.alpha.im),
        Some(b.re),
        Some(b.im),
        Some(ph.theta()),
        Some(ph.phi()),
        Some(ph.chi()),
        pt.template.l.map(|l| f64::from(l.get())),
    ]
}

fn field_rows(field: &ScalarField) -> Vec<(Vec<Option<f64>>, Option<&'static str>)> {
    field
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let (x, y) = field.grid().point(k);
            (vec![Some(x), Some(y), Some(*v)], None)
        })
        .collect()
}

fn cell(r: Result<f64>, flag: &mut Option<&'static str>) -> Option<f64> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            flag.get_or_insert(e.kind());
            None
        }
    }
}

fn evaluate(spec: &SweepSpec, p: &GcsParams, cutoff: usize, keep_field: bool) -> Result<PointOut> {
    let mut out = PointOut::default();
    match spec.quantity {
        Quantity::Wigner => {
            let grid = spec.grid.unwrap_or_else(|| default_negativity_grid(p));
            let f = wigner_grid(p, &grid);
            out.rows = field_rows(&f);
            out.field = keep_field.then_some(f);
        }
        Quantity::Sensitivity => {
            let grid = spec.grid.unwrap_or_else(default_sensitivity_grid);
            let f = sensitivity_map(p, &grid);
            out.rows = field_rows(&f);
            out.field = keep_field.then_some(f);
        }
        Quantity::Negativity | Quantity::NegativityVsL => {
            let grid = spec.grid.unwrap_or_else(|| default_negativity_grid(p));
            let nv = negative_volume(&wigner_grid(p, &grid))?;
            out.quad_error = nv.error;
            out.rows = vec![(vec![Some(nv.value), nv.error], None)];
        }
        Quantity::Stats => {
            let mut flag = None;
            let (n, q, g2, a3) = match stat_report(p) {
                Ok(s) => (Some(s.mean_n), Some(s.q), Some(s.g2), Some(s.a3)),
                Err(Error::DegenerateDenominator { .. }) => {
                    flag = Some("degenerate_denominator");
                    let m = compass_core::statistics::normally_ordered_moment(p, 1);
                    let m2 = compass_core::statistics::normally_ordered_moment(p, 2);
                    (Some(m), Some(m2 / m - m), Some(m2 / (m * m)), None)
                }
                Err(e) => {
                    flag = Some(e.kind());
                    (None, None, None, None)
                }
            };
            let angle = QuadratureAngle::new(spec.angle)?;
            let sq = quadrature_variances(p, angle);
            let hm4 = cell(hong_mandel_s(p, 4, angle), &mut flag);
            out.rows = vec![(
                vec![
                    n,
                    q,
                    g2,
                    a3,
                    Some(sq.s_x),
                    Some(sq.s_y),
                    Some(sq.var_x),
                    Some(sq.var_y),
                    hm4,
                ],
                flag,
            )];
        }
        Quantity::Squeezing => {
            let angle = QuadratureAngle::new(spec.angle)?;
            let sq = quadrature_variances(p, angle);
            let mut flag = None;
            let hm = [2, 4, 6].map(|l| cell(hong_mandel_s(p, l, angle), &mut flag));
            out.rows = vec![(
                vec![
                    Some(angle.get()),
                    Some(sq.var_x),
                    Some(sq.var_y),
                    Some(sq.s_x),
                    Some(sq.s_y),
                    hm[0],
                    hm[1],
                    hm[2],
                ],
                flag,
            )];
        }
        Quantity::Pnd => {
            let n_max = spec.n_max.unwrap_or(cutoff);
            out.rows = pnd_table(p, n_max)
                .into_iter()
                .enumerate()
                .map(|(n, prob)| (vec![Some(n as f64), Some(prob)], None))
                .collect();
        }
        Quantity::Quadrature => {
            let (lo, hi, count) = match &spec.grid {
                Some(g) => (g.x_range().0, g.x_range().1, g.nx()),
                None => {
                    let r = p.alpha().norm().max(p.beta().norm()) + 5.0;
                    (-r, r, 201)
                }
            };
            out.rows = (0..count)
                .map(|i| {
                    let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
                    (vec![Some(x), Some(quadrature_density(p, x))], None)
                })
                .collect();
        }
        Quantity::Tiles => {
            let t = tile_metrics(p)?;
            out.rows = vec![(
                vec![
                    Some(t.center_value),
                    Some(f64::from(t.center_sign)),
                    Some(t.first_zero_x),
                    Some(t.first_zero_y),
                    Some(t.tile_area),
                    Some(t.predicted_area_scale),
                ],
                None,
            )];
        }
    }
    Ok(out)
}

/// Evaluate every (state, α) point. Points are computed in parallel and
/// reassembled in spec order, so output does not depend on thread count.
/// Points that fail (e.g. a null state) become flagged rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let templates = spec.state.templates()?;
    let alphas = spec.alpha.points()?;
    let points: Vec<Point> = if spec.quantity == Quantity::NegativityVsL {
        alphas
            .iter()
            .flat_map(|&alpha| {
                templates
                    .iter()
                    .map(move |&template| Point { template, alpha })
            })
            .collect()
    } else {
        templates
            .iter()
            .flat_map(|&template| alphas.iter().map(move |&alpha| Point { template, alpha }))
            .collect()
    };
    let cutoff = spec.effective_cutoff()?;
    let keep_field = spec.format == Format::Bin;
    let outs = par::map_indexed(points.len(), |i| {
        points[i]
            .template
            .build(points[i].alpha)
            .and_then(|p| evaluate(spec, &p, cutoff, keep_field))
    });

    let specific = columns(spec.quantity);
    let mut rows = Vec::new();
    let mut quad_error: Option<f64> = None;
    let mut field = None;
    for (pt, out) in points.iter().zip(outs) {
        let head = prefix(pt);
        match out {
            Ok(o) => {
                if let Some(e) = o.quad_error {
                    quad_error = Some(quad_error.map_or(e, |m| m.max(e)));
                }
                if o.field.is_some() {
                    field = o.field;
                }
                for (vals, flag) in o.rows {
                    let mut values = head.clone();
                    values.extend(vals);
                    rows.push(Row {
                        values,
                        flag: flag.map(String::from),
                    });
                }
            }
            Err(e) => {
                let mut values = head;
                values.extend(std::iter::repeat_n(None, specific.len()));
                rows.push(Row {
                    values,
                    flag: Some(e.kind().to_string()),
                });
            }
        }
    }

    let mut columns: Vec<String> = PREFIX
        .iter()
        .chain(specific)
        .map(|s| s.to_string())
        .collect();
    columns.push("flag".into());
    let metadata = vec![
        ("tool".into(), "compass".into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("quantity".into(), quantity_name(spec.quantity)),
        ("wigner_prefactor".into(), fmt_f64(WIGNER_PREFACTOR)),
        ("wigner_convention".into(), WIGNER_CONVENTION.into()),
        ("fock_cutoff".into(), cutoff.to_string()),
        (
            "max_quadrature_error".into(),
            quad_error.map_or_else(|| "none".into(), fmt_f64),
        ),
        ("rows".into(), rows.len().to_string()),
    ];
    Ok(SweepResult {
        quantity: spec.quantity,
        columns,
        rows,
        metadata,
        field,
    })
}

fn quantity_name(q: Quantity) -> String {
    serde_json::to_value(q)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}={v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let mut cells: Vec<String> = row
                .values
                .iter()
                .map(|v| v.map(fmt_f64).unwrap_or_default())
                .collect();
            cells.push(row.flag.clone().unwrap_or_default());
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let meta: serde_json::Map<String, Value> = self
            .metadata
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells: Vec<Value> = r.values.iter().map(|v| json!(v)).collect();
                cells.push(json!(r.flag));
                Value::Array(cells)
            })
            .collect();
        json!({ "metadata": meta, "columns": self.columns, "rows": rows })
    }

    pub fn write_json<W: Write>(&self, w: W) -> io::Result<()> {
        serde_json::to_writer_pretty(w, &self.to_json()).map_err(io::Error::other)
    }

    fn metadata_json(&self) -> Value {
        Value::Object(
            self.metadata
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect(),
        )
    }

    /// Write in `format` to `path`, or to stdout when `path` is `None`.
    /// Binary output writes the payload to `path` and its header to
    /// `path.json`.
    pub fn write(&self, format: Format, path: Option<&Path>) -> Result<()> {
        let io_err = |e: io::Error| Error::InvalidSpec(format!("output: {e}"));
        match format {
            Format::Bin => {
                let path = path
                    .ok_or_else(|| Error::InvalidSpec("bin format needs an output path".into()))?;
                let field = self
                    .field
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("no field to write".into()))?;
                let labels: [&str; 3] = match self.quantity {
                    Quantity::Sensitivity => ["delta_x", "delta_p", "F"],
                    _ => ["x", "y", "W"],
                };
                let header = File::create(header_path(path)).map_err(io_err)?;
                let data = BufWriter::new(File::create(path).map_err(io_err)?);
                field
                    .write_binary(header, data, labels, self.metadata_json())
                    .map_err(io_err)
            }
            _ => {
                let sink: Box<dyn Write> = match path {
                    Some(p) => Box::new(File::create(p).map_err(io_err)?),
                    None => Box::new(io::stdout().lock()),
                };
                let mut w = BufWriter::new(sink);
                if format == Format::Json {
                    self.write_json(&mut w).map_err(io_err)?;
                    writeln!(w).map_err(io_err)?;
                } else {
                    self.write_csv(&mut w).map_err(io_err)?;
                }
                w.flush().map_err(io_err)
            }
        }
    }
}

pub fn header_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{AlphaSpec, StateSelector};

    fn spec(quantity: Quantity, l: Vec<u8>, alpha: AlphaSpec) -> SweepSpec {
        SweepSpec {
            quantity,
            state: StateSelector::Canonical {
                l,
                beta_ratio: None,
            },
            alpha,
            grid: None,
            output: None,
            format: Format::Csv,
            cutoff: None,
            angle: 0.0,
            n_max: None,
        }
    }

    #[test]
    fn null_state_becomes_flagged_row() {
        let s = spec(
            Quantity::Stats,
            vec![1],
            AlphaSpec::List {
                values: vec![0.0, 1.0],
                arg: 0.0,
            },
        );
        let r = run_sweep(&s).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].flag.as_deref(), Some("null_state"));
        assert!(r.rows[1].flag.is_none());
        let q = r.column("Q").unwrap();
        assert!(r.rows[0].values[q].is_none());
        assert!(r.rows[1].values[q].is_some());
    }

    #[test]
    fn rows_follow_spec_order() {
        let s = spec(
            Quantity::Tiles,
            vec![0, 2],
            AlphaSpec::Range {
                start: 2.0,
                stop: 4.0,
                count: 3,
                arg: 0.0,
            },
        );
        let r = run_sweep(&s).unwrap();
        let a = r.column("alpha_re").unwrap();
        let l = r.column("l").unwrap();
        let got: Vec<(f64, f64)> = r
            .rows
            .iter()
            .map(|x| (x.values[l].unwrap(), x.values[a].unwrap()))
            .collect();
        assert_eq!(
            got,
            vec![
                (0.0, 2.0),
                (0.0, 3.0),
                (0.0, 4.0),
                (2.0, 2.0),
                (2.0, 3.0),
                (2.0, 4.0)
            ]
        );
    }

    #[test]
    fn csv_carries_metadata() {
        let s = spec(Quantity::Pnd, vec![0], AlphaSpec::Fixed([1.0, 0.0]));
        let r = run_sweep(&s).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# wigner_prefactor="));
        assert!(text.contains("# fock_cutoff="));
        assert!(text.lines().any(|l| l.starts_with("alpha_re,")));
    }
}

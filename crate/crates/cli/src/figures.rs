//! Data sets behind each figure: one CSV per panel plus a JSON manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ngforge_core::analysis::{concurrence_bell_like, linear_entropy, pure_state_concurrence, tmsv_linear_entropy};
use ngforge_core::measurement::WeakValue;
use ngforge_core::protocols::{bell_branches, phi_branches, BellVariant, Family};
use ngforge_core::{Complex64, SqueezeParam, TruncationDim};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Axis, AxisName, EntropyArg, FamilyArg, GridArgs, Metric, SectionArg, SectionArgs, StateArgs};
use crate::commands::{cmd_jointwigner, cmd_sweep, cmd_wigner, SweepArgs};
use crate::output::{emit, Report, Table, TOOL, VERSION};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
    Fig9,
    All,
}

impl FigureId {
    pub const EACH: [FigureId; 7] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
    ];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("id serializes");
        f.write_str(s.as_str().expect("string id"))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FigureArgs {
    /// Figure to regenerate.
    #[arg(value_enum)]
    pub id: FigureId,
    /// Directory receiving the panel files.
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
    /// Wigner grid points per axis.
    #[arg(long, default_value_t = 201)]
    pub wigner_points: usize,
    /// Joint-parity section points per axis.
    #[arg(long, default_value_t = 161)]
    pub section_points: usize,
}

/// One panel's data.
#[derive(Debug, Clone)]
pub struct Panel {
    pub name: &'static str,
    pub title: String,
    pub report: Report,
}

const PANELS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn state(family: FamilyArg, s: f64) -> StateArgs {
    let mut a = StateArgs::new(family);
    a.s = s;
    a
}

fn grid(points: usize) -> GridArgs {
    GridArgs {
        x_min: -6.0,
        x_max: 6.0,
        p_min: -6.0,
        p_max: 6.0,
        points,
    }
}

fn wigner_panels(inputs: Vec<(String, StateArgs)>, points: usize) -> Result<Vec<Panel>, CliError> {
    let g = grid(points);
    inputs
        .into_iter()
        .zip(PANELS)
        .map(|((title, args), name)| {
            Ok(Panel {
                name,
                title,
                report: cmd_wigner(&args, &g)?,
            })
        })
        .collect()
}

/// Several sweeps along the same axis, one per value of `param`, merged into
/// one table with a leading `param` column.
fn curve_family(
    param: &str,
    values: &[f64],
    make: impl Fn(f64) -> SweepArgs,
) -> Result<Report, CliError> {
    let mut table: Option<Table> = None;
    let mut configs = Vec::new();
    for &v in values {
        let sweep = make(v);
        let r = cmd_sweep(&sweep)?;
        configs.push(r.config.clone());
        let t = table.get_or_insert_with(|| {
            let mut cols = vec![param.to_string()];
            cols.extend(r.table.columns.iter().cloned());
            Table {
                columns: cols,
                rows: Vec::new(),
            }
        });
        for row in &r.table.rows {
            let mut full = vec![v];
            full.extend(row);
            t.rows.push(full);
        }
    }
    Ok(Report::new(
        "sweep",
        json!({ "curves": configs }),
        table.unwrap_or_default(),
    ))
}

fn theta_axis() -> Axis {
    Axis {
        name: AxisName::Theta,
        start: 0.0,
        stop: std::f64::consts::PI * 179.0 / 180.0,
        n: 180,
    }
}

fn probability_vs_theta(family: FamilyArg, r: f64) -> Result<Report, CliError> {
    curve_family("s", &[0.5, 1.0, 2.0], |s| {
        let mut st = state(family, s);
        st.r = r;
        st.theta = Some(0.0);
        st.delta = Some(0.0);
        SweepArgs {
            state: st,
            x: theta_axis(),
            y: None,
            metric: Metric::P,
            entropy: EntropyArg::Asymptotic,
        }
    })
}

fn fig2(points: usize) -> Result<Vec<Panel>, CliError> {
    let mut input = state(FamilyArg::Input, 1.5);
    input.r = 1.0;
    let mut inputs = vec![("input squeezed vacuum".to_string(), input)];
    for w in [0.0, 10.0, 0.5] {
        let mut a = state(FamilyArg::Psi2, 1.5);
        a.r = 1.0;
        a.wv = Some(c(w, 0.0));
        inputs.push((format!("psi2 wv={w}"), a));
    }
    wigner_panels(inputs, points)
}

fn fig4(points: usize) -> Result<Vec<Panel>, CliError> {
    let mut input = state(FamilyArg::Input, 1.5);
    input.alpha = c(1.0, 0.0);
    let mut inputs = vec![("input coherent state".to_string(), input)];
    for (label, w) in [("0", c(0.0, 0.0)), ("10", c(10.0, 0.0)), ("-i", c(0.0, -1.0))] {
        let mut a = state(FamilyArg::Psi3, 1.5);
        a.alpha = c(1.0, 0.0);
        a.wv = Some(w);
        inputs.push((format!("psi3 wv={label}"), a));
    }
    wigner_panels(inputs, points)
}

fn fig7(points: usize) -> Result<Vec<Panel>, CliError> {
    let sections = [SectionArg::Rere, SectionArg::Imim, SectionArg::Rediag, SectionArg::Imdiag];
    let mut panels = Vec::new();
    let mut names = PANELS.iter();
    for r in [0.2, 1.0] {
        let mut a = state(FamilyArg::Phi2, 1.5);
        a.r = r;
        a.wv = Some(c(10.0, 0.0));
        for section in sections {
            let spec = SectionArgs {
                section,
                min: -4.0,
                max: 4.0,
                points,
            };
            panels.push(Panel {
                name: names.next().expect("eight panels"),
                title: format!("phi2 r={r} {}", serde_json::to_value(section).expect("section")),
                report: cmd_jointwigner(&a, &spec)?,
            });
        }
    }
    Ok(panels)
}

fn entropy_vs_s(family: FamilyArg) -> Result<Report, CliError> {
    curve_family("r", &[0.5, 1.0], |r| {
        let mut st = state(family, 0.0);
        st.r = r;
        st.wv = Some(c(10.0, 0.0));
        SweepArgs {
            state: st,
            x: Axis {
                name: AxisName::S,
                start: 0.0,
                stop: 2.0,
                n: 41,
            },
            y: None,
            metric: Metric::LinearEntropy,
            entropy: EntropyArg::Asymptotic,
        }
    })
}

#[derive(Serialize)]
struct WeakValueCurves {
    family: Family,
    r: f64,
    s_values: Vec<f64>,
    wv: Axis,
    entropy: EntropyArg,
}

/// E against a real weak value; each s shares one pair of branches.
fn entropy_vs_wv(family: Family) -> Result<Report, CliError> {
    let cfg = WeakValueCurves {
        family,
        r: 1.0,
        s_values: vec![0.05, 0.1, 1.0],
        wv: Axis {
            name: AxisName::Wv,
            start: -10.0,
            stop: 10.0,
            n: 81,
        },
        entropy: EntropyArg::Asymptotic,
    };
    let mode = family.measured_mode().expect("two-mode family");
    let xi = SqueezeParam::real(cfg.r)?;
    let baseline = tmsv_linear_entropy(cfg.r);
    let mut t = Table::new(&["s", "wv", "linear_entropy", "tmsv"]);
    for &s in &cfg.s_values {
        let branches = phi_branches(xi, s, mode, TruncationDim::two_mode_default())?;
        for w in cfg.wv.values() {
            let v = branches.combine(WeakValue::real(w))?;
            t.push(vec![s, w, linear_entropy(&v, cfg.entropy.convention())?, baseline]);
        }
    }
    Ok(Report::new("figure", cfg, t))
}

#[derive(Serialize)]
struct ConcurrenceGrid {
    s: Axis,
    wv: Axis,
}

/// C of Φ₃ and Φ₄ over an (s, wv) grid, with the closed form alongside.
fn concurrence_grid(s_axis: Axis, wv_axis: Axis) -> Result<Report, CliError> {
    let mut t = Table::new(&["s", "wv", "c_phi3", "c_phi4", "c_closed"]);
    let dim = TruncationDim::two_mode_default();
    for s in s_axis.values() {
        let b3 = bell_branches(s, BellVariant::Phi3, dim)?;
        let b4 = bell_branches(s, BellVariant::Phi4, dim)?;
        for w in wv_axis.values() {
            let wv = WeakValue::real(w);
            t.push(vec![
                s,
                w,
                pure_state_concurrence(&b3.combine(wv)?)?,
                pure_state_concurrence(&b4.combine(wv)?)?,
                concurrence_bell_like(s, wv)?,
            ]);
        }
    }
    Ok(Report::new(
        "figure",
        ConcurrenceGrid {
            s: s_axis,
            wv: wv_axis,
        },
        t,
    ))
}

fn axis(name: AxisName, start: f64, stop: f64, n: usize) -> Axis {
    Axis { name, start, stop, n }
}

fn fig9() -> Result<Vec<Panel>, CliError> {
    Ok(vec![
        Panel {
            name: "a",
            title: "concurrence surface".into(),
            report: concurrence_grid(axis(AxisName::S, 0.0, 3.0, 31), axis(AxisName::Wv, -10.0, 10.0, 41))?,
        },
        Panel {
            name: "b",
            title: "concurrence vs wv at s=1.5".into(),
            report: concurrence_grid(axis(AxisName::S, 1.5, 1.5, 1), axis(AxisName::Wv, -10.0, 10.0, 201))?,
        },
        Panel {
            name: "c",
            title: "concurrence vs s at wv=10".into(),
            report: concurrence_grid(axis(AxisName::S, 0.0, 3.0, 61), axis(AxisName::Wv, 10.0, 10.0, 1))?,
        },
    ])
}

/// Computes every panel of one figure.
pub fn figure_panels(id: FigureId, args: &FigureArgs) -> Result<Vec<Panel>, CliError> {
    match id {
        FigureId::Fig2 => fig2(args.wigner_points),
        FigureId::Fig3 => Ok(vec![Panel {
            name: "a",
            title: "psi2 success probability vs theta, r=0.5".into(),
            report: probability_vs_theta(FamilyArg::Psi2, 0.5)?,
        }]),
        FigureId::Fig4 => fig4(args.wigner_points),
        FigureId::Fig5 => Ok(vec![Panel {
            name: "a",
            title: "psi4 success probability vs theta".into(),
            report: probability_vs_theta(FamilyArg::Psi4, 0.0)?,
        }]),
        FigureId::Fig7 => fig7(args.section_points),
        FigureId::Fig8 => Ok(vec![
            Panel {
                name: "a",
                title: "phi1 linear entropy vs s, wv=10".into(),
                report: entropy_vs_s(FamilyArg::Phi1)?,
            },
            Panel {
                name: "b",
                title: "phi1 linear entropy vs wv, r=1".into(),
                report: entropy_vs_wv(Family::Phi1)?,
            },
            Panel {
                name: "c",
                title: "phi2 linear entropy vs s, wv=10".into(),
                report: entropy_vs_s(FamilyArg::Phi2)?,
            },
            Panel {
                name: "d",
                title: "phi2 linear entropy vs wv, r=1".into(),
                report: entropy_vs_wv(Family::Phi2)?,
            },
        ]),
        FigureId::Fig9 => fig9(),
        FigureId::All => Err(CliError::Usage("`all` names several figures".into())),
    }
}

fn write_one(id: FigureId, args: &FigureArgs) -> Result<Vec<PathBuf>, CliError> {
    let panels = figure_panels(id, args)?;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for p in &panels {
        let file = format!("{id}_{}.csv", p.name);
        let path = args.out_dir.join(&file);
        emit(&p.report.to_csv(), Some(&path))?;
        entries.push(json!({
            "panel": p.name,
            "title": p.title,
            "file": file,
            "config": p.report.config,
            "results": p.report.results,
        }));
        written.push(path);
    }
    let manifest: Value = json!({
        "tool": TOOL,
        "version": VERSION,
        "figure": id,
        "panels": entries,
    });
    let path = args.out_dir.join(format!("{id}_manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    emit(&text, Some(&path))?;
    written.push(path);
    Ok(written)
}

/// Writes the panel files and manifest of `args.id` (or of every figure).
pub fn cmd_figure(args: &FigureArgs) -> Result<Vec<PathBuf>, CliError> {
    let ids: Vec<FigureId> = match args.id {
        FigureId::All => FigureId::EACH.to_vec(),
        id => vec![id],
    };
    let mut out = Vec::new();
    for id in ids {
        out.extend(write_one(id, args)?);
    }
    Ok(out)
}

/// Paths of a figure's panel files inside `dir`.
pub fn panel_path(dir: &Path, id: FigureId, panel: &str) -> PathBuf {
    dir.join(format!("{id}_{panel}.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_render_lowercase() {
        assert_eq!(FigureId::Fig7.to_string(), "fig7");
        assert_eq!(panel_path(Path::new("d"), FigureId::Fig2, "b"), PathBuf::from("d/fig2_b.csv"));
    }

    #[test]
    fn fig5_curves_are_flat_at_strong_coupling() {
        let r = probability_vs_theta(FamilyArg::Psi4, 0.0).unwrap();
        assert_eq!(r.table.rows.len(), 3 * 180);
        for row in r.table.rows.iter().filter(|row| row[0] == 2.0) {
            assert!((row[2] - 0.5).abs() < 5e-4, "{row:?}");
        }
        for row in &r.table.rows {
            assert!((row[2] - row[3]).abs() < 1e-10, "{row:?}");
        }
    }

    #[test]
    fn concurrence_grid_agrees_with_closed_form() {
        let r = concurrence_grid(axis(AxisName::S, 0.0, 2.0, 3), axis(AxisName::Wv, -2.0, 2.0, 5)).unwrap();
        for row in &r.table.rows {
            assert!((row[2] - row[4]).abs() < 1e-8, "{row:?}");
            assert!((row[3] - row[4]).abs() < 1e-8, "{row:?}");
        }
    }
}

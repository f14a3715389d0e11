//! Job execution: grid expansion, parallel row evaluation, table assembly.

use crate::config::{signature_from_grid, Job, Kind};
use crate::output::{eval_json, Table};
use hdg_core::calculus::{cr_residual, cr_residual_polar};
use hdg_core::constraints::{check_regular, frenet_data, Constraint, REGULARITY_NORM_TOL};
use hdg_core::expr::{parse, Env, Var};
use hdg_core::forms::{structural_residuals, UnitFrame};
use hdg_core::QuaternionField;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Numeric(String),
    Io(String),
}

type RowResult = Result<Vec<f64>, String>;

/// Cartesian-product view of the grid; the last variable varies fastest.
struct Grid {
    vars: Vec<Var>,
    values: Vec<Vec<f64>>,
}

impl Grid {
    fn new(job: &Job) -> Self {
        Self {
            vars: job.grid.iter().map(|(v, _)| *v).collect(),
            values: job.grid.iter().map(|(_, s)| s.values()).collect(),
        }
    }

    fn len(&self) -> usize {
        self.values.iter().map(|v| v.len()).product::<usize>().max(
            // an empty grid still has the single empty point
            if self.values.is_empty() { 1 } else { 0 },
        )
    }

    fn point(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.vars.len()];
        for axis in (0..self.vars.len()).rev() {
            let n = self.values[axis].len();
            out[axis] = self.values[axis][index % n];
            index /= n;
        }
        out
    }

    fn describe(&self, point: &[f64]) -> String {
        self.vars
            .iter()
            .zip(point)
            .map(|(v, x)| format!("{}={}", v.name(), crate::output::fmt_f64(*x)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn parallel_rows<F>(n: usize, threads: usize, f: F) -> Vec<RowResult>
where
    F: Fn(usize) -> RowResult + Sync,
{
    if threads <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<RowResult>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = f(i);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("row computed"))
        .collect()
}

fn collect_table(
    grid: &Grid,
    columns: Vec<String>,
    threads: usize,
    row_fn: impl Fn(&[f64]) -> Result<Vec<f64>, hdg_core::Error> + Sync,
) -> Result<Table, AppError> {
    let n = grid.len();
    let rows = parallel_rows(n, threads, |i| {
        let point = grid.point(i);
        row_fn(&point).map_err(|e| format!("at {}: {e}", grid.describe(&point)))
    });
    let mut out = Vec::with_capacity(n);
    for row in rows {
        match row {
            Ok(r) => out.push(r),
            Err(msg) => return Err(AppError::Numeric(msg)),
        }
    }
    Ok(Table {
        columns,
        rows: out,
    })
}

/// Free variables of the expression must all be gridded.
fn require_covered(expr_src: &str, grid_vars: &[Var]) -> Result<(), AppError> {
    let ast = parse(expr_src).map_err(|e| AppError::Config(e.to_string()))?;
    for v in ast.free_vars() {
        if !grid_vars.contains(&v) {
            return Err(AppError::Config(format!(
                "expression variable `{}` has no grid",
                v.name()
            )));
        }
    }
    Ok(())
}

/// Execute the job and return the rendered artifact.
pub fn run_job(job: &Job) -> Result<String, AppError> {
    let grid = Grid::new(job);
    let table = match job.kind {
        Kind::Eval => return run_eval(job),
        Kind::Frame => run_frame(job, &grid)?,
        Kind::Regular => run_regular(job, &grid)?,
        Kind::Forms => run_forms(job, &grid)?,
        Kind::CrCheck => run_cr(job, &grid, false)?,
        Kind::CrCheckPolar => run_cr(job, &grid, true)?,
    };
    Ok(match job.format {
        crate::config::Format::Csv => table.to_csv(),
        crate::config::Format::Json => table.to_json(),
    })
}

fn run_eval(job: &Job) -> Result<String, AppError> {
    let ast = parse(&job.expr).map_err(|e| AppError::Config(e.to_string()))?;
    if let Some(v) = ast.free_vars().first() {
        return Err(AppError::Config(format!(
            "eval expression must be closed; `{}` is free",
            v.name()
        )));
    }
    let q = ast
        .eval(&Env::new())
        .map_err(|e| AppError::Numeric(e.to_string()))?;
    Ok(match job.format {
        crate::config::Format::Json => eval_json(q.components()),
        crate::config::Format::Csv => Table {
            columns: ["x0", "x1", "x2", "x3"].map(String::from).to_vec(),
            rows: vec![q.components().to_vec()],
        }
        .to_csv(),
    })
}

fn param_columns(names: &[&'static str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn run_frame(job: &Job, grid: &Grid) -> Result<Table, AppError> {
    let nparams = signature_from_grid(&grid.vars).map_err(AppError::Config)?;
    let c = Constraint::from_expr(&job.expr, nparams)
        .map_err(|e| AppError::Config(e.to_string()))?;
    let names: Vec<&'static str> = (0..nparams).map(|a| c.param_name(a)).collect();

    let mut columns = param_columns(&names);
    columns.extend(["q0", "q1", "q2", "q3"].map(String::from));
    for a in &names {
        columns.push(format!("qa_norm_{a}"));
        for l in 1..=3 {
            columns.push(format!("kappa_{a}_{l}"));
        }
        columns.push(format!("kappa_{a}_abs"));
        columns.push(format!("radius_{a}"));
    }
    for a in &names {
        for b in &names {
            if a == b {
                continue;
            }
            for l in 1..=3 {
                columns.push(format!("tau_{a}{b}_{l}"));
            }
            columns.push(format!("tau_{a}{b}_abs"));
            columns.push(format!("radius_{a}{b}"));
        }
    }
    columns.push("regular".to_string());

    let diff = job.diff;
    collect_table(grid, columns, job.threads, move |point| {
        let data = frenet_data(&c, point, &diff)?;
        let q = c.value(point)?;
        let mut row = point.to_vec();
        row.extend(q.components());
        for pf in &data.per_param {
            row.push(pf.tangent_norm);
            row.push(pf.curvature.x1);
            row.push(pf.curvature.x2);
            row.push(pf.curvature.x3);
            row.push(pf.curvature_norm);
            row.push(pf.curvature_radius);
        }
        for pair in &data.pairs {
            row.push(pair.torsion.x1);
            row.push(pair.torsion.x2);
            row.push(pair.torsion.x3);
            row.push(pair.torsion_norm);
            row.push(pair.torsion_radius);
        }
        row.push(if data.regularity.regular { 1.0 } else { 0.0 });
        Ok(row)
    })
}

fn run_regular(job: &Job, grid: &Grid) -> Result<Table, AppError> {
    let nparams = signature_from_grid(&grid.vars).map_err(AppError::Config)?;
    let c = Constraint::from_expr(&job.expr, nparams)
        .map_err(|e| AppError::Config(e.to_string()))?;
    let names: Vec<&'static str> = (0..nparams).map(|a| c.param_name(a)).collect();

    let mut columns = param_columns(&names);
    for a in &names {
        columns.push(format!("qa_norm_{a}"));
    }
    for k in 1..=nparams {
        columns.push(format!("gram_eig_{k}"));
    }
    columns.push("gram_det".to_string());
    columns.push("normalized_det".to_string());
    columns.push("regular".to_string());

    let diff = job.diff;
    collect_table(grid, columns, job.threads, move |point| {
        let report = check_regular(&c, point, REGULARITY_NORM_TOL, &diff)?;
        let mut row = point.to_vec();
        row.extend(report.tangent_norms.iter());
        row.extend(report.gram_eigenvalues.iter());
        row.push(report.gram_det);
        row.push(report.normalized_det);
        row.push(if report.regular { 1.0 } else { 0.0 });
        Ok(row)
    })
}

fn run_forms(job: &Job, grid: &Grid) -> Result<Table, AppError> {
    let nparams = signature_from_grid(&grid.vars).map_err(AppError::Config)?;
    let frame = UnitFrame::from_expr(&job.expr, nparams)
        .map_err(|e| AppError::Config(e.to_string()))?;
    let names: Vec<&'static str> = (0..nparams).map(|a| frame.param_name(a)).collect();

    let mut columns = param_columns(&names);
    columns.push("first_resid".to_string());
    columns.push("second_minus".to_string());
    columns.push("second_plus".to_string());

    let diff = job.diff;
    collect_table(grid, columns, job.threads, move |point| {
        let res = structural_residuals(&frame, point, &diff)?;
        let mut row = point.to_vec();
        row.push(res.first_max);
        row.push(res.second_minus_max);
        row.push(res.second_plus_max);
        Ok(row)
    })
}

fn run_cr(job: &Job, grid: &Grid, polar: bool) -> Result<Table, AppError> {
    require_covered(&job.expr, &grid.vars)?;
    let field = if polar {
        QuaternionField::polar_expr(&job.expr)
    } else {
        QuaternionField::cartesian_expr(&job.expr)
    }
    .map_err(|e| AppError::Config(e.to_string()))?;

    // defaults for coordinates without a grid; polar defaults sit away from
    // the coordinate singularities
    let coord_vars = field.coords().vars();
    let defaults: [f64; 4] = if polar {
        [1.0, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 0.0]
    } else {
        [0.0; 4]
    };
    let slots: Vec<Option<usize>> = coord_vars
        .iter()
        .map(|cv| grid.vars.iter().position(|g| g == cv))
        .collect();

    let mut columns: Vec<String> = coord_vars.iter().map(|v| v.name().to_string()).collect();
    columns.extend(["r0", "r1", "r2", "r3"].map(String::from));

    let diff = job.diff;
    collect_table(grid, columns, job.threads, move |point| {
        let mut p = defaults;
        for (slot, target) in slots.iter().zip(p.iter_mut()) {
            if let Some(idx) = slot {
                *target = point[*idx];
            }
        }
        let rows = if polar {
            cr_residual_polar(&field, p, &diff)?
        } else {
            cr_residual(&field, p, &diff)?
        };
        let mut row = p.to_vec();
        row.extend(rows);
        Ok(row)
    })
}

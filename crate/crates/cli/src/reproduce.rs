//! Side-by-side comparison of published values with freshly computed ones.

use std::path::Path;

use serde::Serialize;

use qcosmo::config::{preset, SCHEMA_VERSION};
use qcosmo::pauli::{decompose, DEFAULT_ZERO_TOL};
use qcosmo::tunneling::tunneling_report;
use qcosmo::vqe::exact_ground;

use crate::commands::write_json;
use crate::settings::CliError;

pub const IDS: [&str; 6] = ["table1", "table2", "table3", "table4", "table5", "tunneling"];

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub quantity: String,
    pub reference: f64,
    pub computed: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl Row {
    fn new(quantity: impl Into<String>, reference: f64, computed: f64) -> Self {
        let abs_err = (computed - reference).abs();
        Row {
            quantity: quantity.into(),
            reference,
            computed,
            abs_err,
            rel_err: if reference == 0.0 {
                f64::INFINITY
            } else {
                abs_err / reference.abs()
            },
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    id: &'a str,
    rows: &'a [Row],
}

fn ground_and_terms(name: &str) -> Result<(f64, usize), CliError> {
    let h = preset(name)?.resolve()?.hamiltonian()?;
    let (e0, _) = exact_ground(&h)?;
    Ok((e0, decompose(&h, DEFAULT_ZERO_TOL)?.len()))
}

fn exact_rows(rows: &mut Vec<Row>, label: &str, name: &str, ground: f64, terms: Option<usize>) -> Result<(), CliError> {
    let (e0, n) = ground_and_terms(name)?;
    rows.push(Row::new(format!("{label} exact ground"), ground, e0));
    if let Some(t) = terms {
        rows.push(Row::new(format!("{label} Pauli terms"), t as f64, n as f64));
    }
    Ok(())
}

pub fn rows(id: &str) -> Result<Vec<Row>, CliError> {
    let mut rows = Vec::new();
    match id {
        "table1" => exact_rows(&mut rows, "starobinsky 16x16", "table1", 0.49785652, Some(135))?,
        "table2" => {
            exact_rows(&mut rows, "dark energy 16x16", "table2-4q", 0.43791588, None)?;
            exact_rows(&mut rows, "dark energy 32x32", "table2-5q", 0.00285585, None)?;
            exact_rows(&mut rows, "dark energy 64x64", "table2-6q", 0.00000112, None)?;
        }
        "table3" => exact_rows(&mut rows, "two-radius 256x256", "table3", 0.00004821, Some(15115))?,
        "table4" => {
            exact_rows(&mut rows, "model one 16x16", "table4-16", 1.01208468, Some(25))?;
            exact_rows(&mut rows, "model one 64x64", "table4-64", 1.01205876, Some(361))?;
            exact_rows(&mut rows, "model one 256x256", "table4-256", 1.01205913, Some(3025))?;
        }
        "table5" => exact_rows(&mut rows, "model two 256x256", "table5", 1.015, Some(3024))?,
        "tunneling" => {
            let v = preset("tunneling")?
                .resolve()?
                .potential()
                .expect("dark-energy potential");
            let r = tunneling_report(&v, 5.0, 3.0)?;
            rows.push(Row::new("V_min", -0.378498, r.v_min));
            rows.push(Row::new("M^2", 0.584376, r.m_sq));
            rows.push(Row::new("delta", 0.139707, r.delta));
            rows.push(Row::new("S_E/4", 1534.44, r.s_e_over_4));
            rows.push(Row::new(
                "log10 lifetime (Planck times)",
                666.0 + 2.505098f64.log10(),
                r.log10_lifetime_planck,
            ));
            rows.push(Row::new(
                "log10 lifetime (years)",
                615.0 + 4.2823f64.log10(),
                r.log10_lifetime_years,
            ));
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown reproduction id '{other}' (known: {})",
                IDS.join(", ")
            )))
        }
    }
    Ok(rows)
}

pub fn table(rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.quantity.len()).max().unwrap_or(8).max(8);
    let mut s = format!(
        "{:<width$}  {:>16}  {:>16}  {:>10}  {:>10}\n",
        "quantity", "reference", "computed", "abs_err", "rel_err"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<width$}  {:>16.8} {:>17.8}  {:>10.3e}  {:>10.3e}\n",
            r.quantity, r.reference, r.computed, r.abs_err, r.rel_err
        ));
    }
    s
}

pub fn run(id: &str, out: &Path) -> Result<(), CliError> {
    let rows = rows(id)?;
    print!("{}", table(&rows));
    let path = write_json(
        out,
        &format!("reproduce-{id}.json"),
        &Report {
            schema_version: SCHEMA_VERSION,
            id,
            rows: &rows,
        },
    )?;
    println!("-> {}", path.display());
    Ok(())
}

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use superopt::candidate::{candidate_document, truncate_analytic};
use superopt::{Result, SolverConfig, SuperoptResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Relative floor below which approximant coefficients are left out of the
/// report.
pub const COEFFICIENT_FLOOR: f64 = 1e-14;

#[derive(Serialize)]
struct Residuals {
    q_interpolant: f64,
    constraint: f64,
    profile_max_deviation: f64,
    profile_stddev: f64,
    norm_chain: f64,
}

#[derive(Serialize)]
struct LevelEntry {
    j: usize,
    t: f64,
    gap: f64,
    trunc: usize,
    rank_x: usize,
    rank_y: usize,
    q_degree: usize,
    residuals: Residuals,
    outer_pass: bool,
}

#[derive(Serialize)]
struct Summary {
    xi_orthonormality: f64,
    eta_orthonormality: f64,
    trailing_singular_max: f64,
    approximant_negative_mass: f64,
    monotone: bool,
    pass: bool,
}

#[derive(Serialize)]
struct Body<'a> {
    schema: u32,
    input_sha256: String,
    config: &'a SolverConfig,
    m: usize,
    n: usize,
    r: usize,
    superoptimal_values: Vec<f64>,
    terminal_t: Option<f64>,
    levels: Vec<LevelEntry>,
    approximant: Value,
    diagnostics: Summary,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The run report. Everything except `timings` is a function of the input
/// bytes and the configuration; `report_sha256` digests exactly that part.
pub fn run_report(input: &[u8], res: &SuperoptResult, timings: Value) -> Result<Value> {
    let (m, n) = (res.symbol.rows(), res.symbol.cols());
    let approximant = truncate_analytic(m, n, &res.approximant_coeffs, COEFFICIENT_FLOOR)?;
    let levels = res
        .report
        .levels
        .iter()
        .map(|l| LevelEntry {
            j: l.level,
            t: l.t,
            gap: l.gap,
            trunc: l.trunc,
            rank_x: l.rank_x,
            rank_y: l.rank_y,
            q_degree: l.q_degree,
            residuals: Residuals {
                q_interpolant: l.q_residual,
                constraint: l.constraint_residual,
                profile_max_deviation: l.profile_max_deviation,
                profile_stddev: l.profile_stddev,
                norm_chain: l.norm_chain,
            },
            outer_pass: l.outer_pass,
        })
        .collect();
    let d = &res.report;
    let body = Body {
        schema: SCHEMA_VERSION,
        input_sha256: sha256_hex(input),
        config: &res.config,
        m,
        n,
        r: res.r,
        superoptimal_values: res.superoptimal_values(),
        terminal_t: res.terminal_t,
        levels,
        approximant: candidate_document(&approximant)?,
        diagnostics: Summary {
            xi_orthonormality: d.xi_orthonormality,
            eta_orthonormality: d.eta_orthonormality,
            trailing_singular_max: d.trailing_singular_max,
            approximant_negative_mass: d.approximant_negative_mass,
            monotone: d.monotone,
            pass: d.pass,
        },
    };
    let mut value = serde_json::to_value(&body).expect("report body serializes");
    let digest = sha256_hex(value.to_string().as_bytes());
    let map = value.as_object_mut().expect("report body is an object");
    map.insert("report_sha256".into(), json!(digest));
    map.insert("timings".into(), timings);
    Ok(value)
}

/// `theta,s_0,…` with one row per grid point, 8 significant digits.
pub fn profile_csv(res: &SuperoptResult) -> String {
    let grid = res.grid();
    let count = res.symbol.rows().min(res.symbol.cols());
    let mut out = String::from("theta");
    for j in 0..count {
        out.push_str(&format!(",s_{j}"));
    }
    out.push('\n');
    for (k, s) in res.error_profile.iter().enumerate() {
        out.push_str(&format!("{:.7e}", grid.theta(k)));
        for v in s.iter().take(count) {
            out.push_str(&format!(",{v:.7e}"));
        }
        out.push('\n');
    }
    out
}

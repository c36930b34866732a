//! Rational matrix symbols: entries are Laurent polynomials or ratios of
//! Laurent polynomials, with no poles on the unit circle.
//!
//! JSON input:
//!
//! ```text
//! {"m":2,"n":2,"entries":[[ENTRY,...],...]}
//! ENTRY = {"laurent":[[k,re,im],...]}
//!       | {"ratio":{"num":[[k,re,im],...],"den":[[k,re,im],...]}}
//! ```

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{CircleGrid, GridMatrix};
use crate::linalg::{polynomial_roots, DenseMatrix};

/// Poles with `| |p| − 1 | ≤ DEFAULT_POLE_MARGIN` count as on the circle.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-6;
/// Largest exponent span accepted for any polynomial in an entry.
pub const MAX_DEGREE: i64 = 64;
const DEN_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, C64>,
}

impl LaurentPoly {
    /// Repeated exponents are summed; zero coefficients are dropped.
    pub fn new(terms: impl IntoIterator<Item = (i64, C64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            *map.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| *c != C64::new(0.0, 0.0));
        Self { terms: map }
    }

    pub fn monomial(k: i64, c: C64) -> Self {
        Self::new([(k, c)])
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn span(&self) -> i64 {
        match (self.min_exponent(), self.max_exponent()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.terms.iter().map(|(&k, &c)| c * z.powi(k as i32)).sum()
    }

    /// Evaluation at the grid point `θ_j`, using exact roots of unity.
    pub fn eval_on_grid(&self, grid: &CircleGrid, j: usize) -> C64 {
        let m = grid.size() as i64;
        self.terms
            .iter()
            .map(|(&k, &c)| c * grid.point(((k * j as i64).rem_euclid(m)) as usize))
            .sum()
    }

    /// Finite roots in the variable `z`, with `z = 0` repeated according to
    /// the lowest exponent when that is positive.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let lo = self
            .min_exponent()
            .ok_or_else(|| Error::Parse("zero polynomial has no isolated roots".into()))?;
        let hi = self.max_exponent().unwrap_or(lo);
        let mut coeffs = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (k, c) in self.terms() {
            coeffs[(k - lo) as usize] = c;
        }
        let mut roots = polynomial_roots(&coeffs)?;
        for _ in 0..lo.max(0) {
            roots.push(C64::new(0.0, 0.0));
        }
        Ok(roots)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RationalEntry {
    Laurent(LaurentPoly),
    Ratio { num: LaurentPoly, den: LaurentPoly },
}

impl RationalEntry {
    pub fn eval(&self, z: C64) -> C64 {
        match self {
            RationalEntry::Laurent(p) => p.eval(z),
            RationalEntry::Ratio { num, den } => num.eval(z) / den.eval(z),
        }
    }

    /// Moduli of the poles, i.e. of the roots of the denominator.
    pub fn pole_moduli(&self) -> Result<Vec<f64>> {
        match self {
            RationalEntry::Laurent(_) => Ok(Vec::new()),
            RationalEntry::Ratio { den, .. } => Ok(den.roots()?.iter().map(|r| r.norm()).collect()),
        }
    }

    fn polys(&self) -> Vec<&LaurentPoly> {
        match self {
            RationalEntry::Laurent(p) => vec![p],
            RationalEntry::Ratio { num, den } => vec![num, den],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSpec {
    m: usize,
    n: usize,
    entries: Vec<RationalEntry>,
}

impl SymbolSpec {
    /// Entries in row-major order.
    pub fn new(m: usize, n: usize, entries: Vec<RationalEntry>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Dimension(format!("symbol must be at least 1x1, got {m}x{n}")));
        }
        if entries.len() != m * n {
            return Err(Error::Dimension(format!("{} entries for a {m}x{n} symbol", entries.len())));
        }
        for (idx, e) in entries.iter().enumerate() {
            for p in e.polys() {
                if p.span() > MAX_DEGREE {
                    return Err(Error::Parse(format!(
                        "entry ({}, {}) has degree span {} above the cap {MAX_DEGREE}",
                        idx / n,
                        idx % n,
                        p.span()
                    )));
                }
            }
            if let RationalEntry::Ratio { den, .. } = e {
                if den.is_zero() {
                    return Err(Error::Parse(format!(
                        "entry ({}, {}) has a zero denominator",
                        idx / n,
                        idx % n
                    )));
                }
            }
        }
        Ok(Self { m, n, entries })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> &RationalEntry {
        &self.entries[r * self.n + c]
    }

    pub fn entries(&self) -> &[RationalEntry] {
        &self.entries
    }

    pub fn eval(&self, z: C64) -> DenseMatrix {
        DenseMatrix::from_fn(self.m, self.n, |r, c| self.entry(r, c).eval(z))
    }

    /// Largest `|k|` over all exponents of all entries.
    pub fn max_abs_exponent(&self) -> i64 {
        self.entries
            .iter()
            .flat_map(|e| e.polys())
            .flat_map(|p| [p.min_exponent(), p.max_exponent()])
            .flatten()
            .map(i64::abs)
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SymbolDoc::from(self)).expect("symbol documents always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&SymbolDoc::from(self)).expect("symbol documents always serialize")
    }
}

type TermDoc = (i64, f64, f64);

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolDoc {
    m: usize,
    n: usize,
    entries: Vec<Vec<EntryDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum EntryDoc {
    Laurent(Vec<TermDoc>),
    Ratio { num: Vec<TermDoc>, den: Vec<TermDoc> },
}

fn poly_from_doc(terms: &[TermDoc]) -> Result<LaurentPoly> {
    for &(k, re, im) in terms {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Parse(format!("non-finite coefficient for exponent {k}")));
        }
    }
    Ok(LaurentPoly::new(terms.iter().map(|&(k, re, im)| (k, C64::new(re, im)))))
}

fn poly_to_doc(p: &LaurentPoly) -> Vec<TermDoc> {
    p.terms().map(|(k, c)| (k, c.re, c.im)).collect()
}

impl From<&SymbolSpec> for SymbolDoc {
    fn from(spec: &SymbolSpec) -> Self {
        let entries = (0..spec.m)
            .map(|r| {
                (0..spec.n)
                    .map(|c| match spec.entry(r, c) {
                        RationalEntry::Laurent(p) => EntryDoc::Laurent(poly_to_doc(p)),
                        RationalEntry::Ratio { num, den } => EntryDoc::Ratio {
                            num: poly_to_doc(num),
                            den: poly_to_doc(den),
                        },
                    })
                    .collect()
            })
            .collect();
        SymbolDoc {
            m: spec.m,
            n: spec.n,
            entries,
        }
    }
}

fn read_document(document: &str) -> Result<SymbolDoc> {
    let doc: SymbolDoc = serde_json::from_str(document).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.entries.len() != doc.m {
        return Err(Error::Dimension(format!(
            "declared m = {} but {} rows given",
            doc.m,
            doc.entries.len()
        )));
    }
    for (r, row) in doc.entries.iter().enumerate() {
        if row.len() != doc.n {
            return Err(Error::Dimension(format!(
                "row {r} has {} entries, expected n = {}",
                row.len(),
                doc.n
            )));
        }
    }
    Ok(doc)
}

/// Parses a symbol document without the pole-on-circle check.
pub fn parse_symbol_unchecked(document: &str) -> Result<SymbolSpec> {
    let doc = read_document(document)?;
    let mut entries = Vec::with_capacity(doc.m * doc.n);
    for e in doc.entries.iter().flatten() {
        entries.push(match e {
            EntryDoc::Laurent(t) => RationalEntry::Laurent(poly_from_doc(t)?),
            EntryDoc::Ratio { num, den } => RationalEntry::Ratio {
                num: poly_from_doc(num)?,
                den: poly_from_doc(den)?,
            },
        });
    }
    SymbolSpec::new(doc.m, doc.n, entries)
}

/// Parses a document in the symbol schema whose entries are all Laurent
/// polynomials. No degree cap applies since no roots are needed. Returns
/// `(m, n, entries)` with entries in row-major order.
pub fn parse_laurent_matrix(document: &str) -> Result<(usize, usize, Vec<LaurentPoly>)> {
    let doc = read_document(document)?;
    let mut entries = Vec::with_capacity(doc.m * doc.n);
    for (i, e) in doc.entries.iter().flatten().enumerate() {
        match e {
            EntryDoc::Laurent(t) => entries.push(poly_from_doc(t)?),
            EntryDoc::Ratio { .. } => {
                return Err(Error::Parse(format!(
                    "entry ({}, {}) is a ratio; only Laurent entries are accepted here",
                    i / doc.n.max(1),
                    i % doc.n.max(1)
                )))
            }
        }
    }
    Ok((doc.m, doc.n, entries))
}

/// The symbol-schema document of a matrix of Laurent polynomials given in
/// row-major order.
pub fn laurent_matrix_document(m: usize, n: usize, entries: &[LaurentPoly]) -> Result<serde_json::Value> {
    if entries.len() != m * n {
        return Err(Error::Dimension(format!(
            "{} entries for a {m}x{n} matrix",
            entries.len()
        )));
    }
    let doc = SymbolDoc {
        m,
        n,
        entries: entries
            .chunks(n.max(1))
            .map(|row| row.iter().map(|p| EntryDoc::Laurent(poly_to_doc(p))).collect())
            .collect(),
    };
    serde_json::to_value(&doc).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_symbol(document: &str) -> Result<SymbolSpec> {
    parse_symbol_with_margin(document, DEFAULT_POLE_MARGIN)
}

pub fn parse_symbol_with_margin(document: &str, pole_margin: f64) -> Result<SymbolSpec> {
    let spec = parse_symbol_unchecked(document)?;
    let report = validate_symbol(&spec, pole_margin);
    if let Some(bad) = report.entries.iter().find(|e| !e.pass) {
        let modulus = bad
            .pole_moduli
            .iter()
            .copied()
            .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
            .unwrap_or(f64::NAN);
        return Err(Error::PoleOnCircle {
            row: bad.row,
            col: bad.col,
            modulus,
        });
    }
    Ok(spec)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryReport {
    pub row: usize,
    pub col: usize,
    pub pole_moduli: Vec<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub pole_margin: f64,
    pub entries: Vec<EntryReport>,
    pub pass: bool,
}

/// Lists pole moduli of every ratio entry and flags poles within
/// `pole_margin` of the circle.
pub fn validate_symbol(spec: &SymbolSpec, pole_margin: f64) -> ValidationReport {
    let mut entries = Vec::new();
    for r in 0..spec.m {
        for c in 0..spec.n {
            let entry = spec.entry(r, c);
            if let RationalEntry::Laurent(_) = entry {
                continue;
            }
            let (pole_moduli, pass, error) = match entry.pole_moduli() {
                Ok(mods) => {
                    let pass = mods.iter().all(|m| (m - 1.0).abs() > pole_margin);
                    (mods, pass, None)
                }
                Err(e) => (Vec::new(), false, Some(e.to_string())),
            };
            entries.push(EntryReport {
                row: r,
                col: c,
                pole_moduli,
                pass,
                error,
            });
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    ValidationReport {
        pole_margin,
        entries,
        pass,
    }
}

/// Entrywise evaluation at the grid points.
pub fn sample_symbol(spec: &SymbolSpec, grid: CircleGrid) -> Result<GridMatrix> {
    let half = grid.half();
    if spec.max_abs_exponent() >= half {
        return Err(Error::Aliasing(format!(
            "exponent {} does not fit in a grid of size {}",
            spec.max_abs_exponent(),
            grid.size()
        )));
    }
    let mut out = GridMatrix::zeros(grid, spec.m, spec.n);
    for r in 0..spec.m {
        for c in 0..spec.n {
            let samples = out.entry_mut(r, c);
            match spec.entry(r, c) {
                RationalEntry::Laurent(p) => {
                    for (j, s) in samples.iter_mut().enumerate() {
                        *s = p.eval_on_grid(&grid, j);
                    }
                }
                RationalEntry::Ratio { num, den } => {
                    for (j, s) in samples.iter_mut().enumerate() {
                        let d = den.eval_on_grid(&grid, j);
                        if d.norm() < DEN_FLOOR {
                            return Err(Error::VanishingDenominator {
                                row: r,
                                col: c,
                                value: d.norm(),
                            });
                        }
                        *s = num.eval_on_grid(&grid, j) / d;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Names accepted by [`builtin_symbol`].
pub const BUILTIN_NAMES: [&str; 3] = ["py2x2", "diag", "scalar-zbar"];

/// Bundled symbols:
///
/// - `py2x2`: `G = B⁻¹A` with `A = diag(√3 + 2z, 1)` and
///   `B = (1/√2)[[z², z], [z, −1]]`, which on the circle is
///   `(1/√2)[[√3 z̄² + 2z̄, z̄], [√3 z̄ + 2, −1]]`;
/// - `diag`: `diag(z̄, 0)`;
/// - `scalar-zbar`: the 1×1 symbol `z̄`.
pub fn builtin_symbol(name: &str) -> Result<SymbolSpec> {
    let c = |re: f64| C64::new(re, 0.0);
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    match name {
        "py2x2" => {
            let a11 = LaurentPoly::new([(0, c(s3)), (1, c(2.0))]);
            SymbolSpec::new(
                2,
                2,
                vec![
                    RationalEntry::Ratio {
                        num: a11.clone(),
                        den: LaurentPoly::monomial(2, c(s2)),
                    },
                    RationalEntry::Ratio {
                        num: LaurentPoly::monomial(0, c(1.0)),
                        den: LaurentPoly::monomial(1, c(s2)),
                    },
                    RationalEntry::Ratio {
                        num: a11,
                        den: LaurentPoly::monomial(1, c(s2)),
                    },
                    RationalEntry::Laurent(LaurentPoly::monomial(0, c(-1.0 / s2))),
                ],
            )
        }
        "diag" => SymbolSpec::new(
            2,
            2,
            vec![
                RationalEntry::Laurent(LaurentPoly::monomial(-1, c(1.0))),
                RationalEntry::Laurent(LaurentPoly::default()),
                RationalEntry::Laurent(LaurentPoly::default()),
                RationalEntry::Laurent(LaurentPoly::default()),
            ],
        ),
        "scalar-zbar" => SymbolSpec::new(1, 1, vec![RationalEntry::Laurent(LaurentPoly::monomial(-1, c(1.0)))]),
        other => Err(Error::Config(format!(
            "unknown example '{other}'; expected one of {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn parse_scalar_zbar() {
        let spec = parse_symbol(r#"{"m":1,"n":1,"entries":[[{"laurent":[[-1,1.0,0.0]]}]]}"#).unwrap();
        assert_eq!(spec.entry(0, 0), &RationalEntry::Laurent(LaurentPoly::monomial(-1, c(1.0, 0.0))));
        let g = sample_symbol(&spec, CircleGrid::new(16).unwrap()).unwrap();
        assert!((g.entry(0, 0)[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn parse_rejects_bad_documents() {
        assert!(matches!(parse_symbol("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_symbol(r#"{"m":2,"n":1,"entries":[[{"laurent":[]}]]}"#),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            parse_symbol(r#"{"m":1,"n":1,"entries":[[{"laurent":[[0.5,1.0,0.0]]}]]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_symbol(r#"{"m":1,"n":1,"entries":[[{"ratio":{"num":[[0,1,0]],"den":[[1,1,0],[0,-1,0]]}}]]}"#),
            Err(Error::PoleOnCircle { .. })
        ));
    }

    #[test]
    fn builtin_py2x2_round_trips_through_json() {
        let spec = builtin_symbol("py2x2").unwrap();
        let back = parse_symbol(&spec.to_json()).unwrap();
        assert_eq!(spec, back);
        assert_eq!((back.rows(), back.cols()), (2, 2));
    }

    #[test]
    fn py2x2_at_one() {
        let spec = builtin_symbol("py2x2").unwrap();
        let g = sample_symbol(&spec, CircleGrid::new(64).unwrap()).unwrap();
        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let want = [[(s3 + 2.0) / s2, 1.0 / s2], [(s3 + 2.0) / s2, -1.0 / s2]];
        let at0 = g.at(0);
        for r in 0..2 {
            for col in 0..2 {
                assert!((at0[(r, col)] - want[r][col]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_symbol_samples_constantly() {
        let spec = SymbolSpec::new(1, 2, vec![
            RationalEntry::Laurent(LaurentPoly::monomial(0, c(2.0, -1.0))),
            RationalEntry::Ratio { num: LaurentPoly::monomial(0, c(3.0, 0.0)), den: LaurentPoly::monomial(0, c(2.0, 0.0)) },
        ]).unwrap();
        let g = sample_symbol(&spec, CircleGrid::new(32).unwrap()).unwrap();
        assert!(g.entry(0, 0).iter().all(|z| (z - c(2.0, -1.0)).norm() < 1e-15));
        assert!(g.entry(0, 1).iter().all(|z| (z - 1.5).norm() < 1e-15));
    }

    #[test]
    fn validation_reports_pole_moduli() {
        let entry = |den: LaurentPoly| {
            SymbolSpec::new(1, 1, vec![RationalEntry::Ratio { num: LaurentPoly::monomial(0, c(1.0, 0.0)), den }]).unwrap()
        };
        let r = validate_symbol(&entry(LaurentPoly::new([(0, c(1.0, 0.0)), (1, c(-0.4, 0.0))])), DEFAULT_POLE_MARGIN);
        assert!(r.pass);
        assert!((r.entries[0].pole_moduli[0] - 2.5).abs() < 1e-14);

        let r = validate_symbol(&entry(LaurentPoly::monomial(1, c(1.0, 0.0))), DEFAULT_POLE_MARGIN);
        assert!(r.pass);
        assert_eq!(r.entries[0].pole_moduli, vec![0.0]);

        let r = validate_symbol(&entry(LaurentPoly::new([(1, c(2.0, 0.0)), (0, c(-2.0, 0.0))])), DEFAULT_POLE_MARGIN);
        assert!(!r.pass);
    }

    #[test]
    fn vanishing_denominator_on_grid() {
        // den = z - 1 vanishes exactly at θ = 0
        let spec = SymbolSpec::new(1, 1, vec![RationalEntry::Ratio {
            num: LaurentPoly::monomial(0, c(1.0, 0.0)),
            den: LaurentPoly::new([(1, c(1.0, 0.0)), (0, c(-1.0, 0.0))]),
        }]).unwrap();
        assert!(matches!(sample_symbol(&spec, CircleGrid::new(16).unwrap()), Err(Error::VanishingDenominator { .. })));
    }

    #[test]
    fn exponent_window_is_enforced() {
        let spec = SymbolSpec::new(1, 1, vec![RationalEntry::Laurent(LaurentPoly::monomial(-8, c(1.0, 0.0)))]).unwrap();
        assert!(matches!(sample_symbol(&spec, CircleGrid::new(16).unwrap()), Err(Error::Aliasing(_))));
        assert!(sample_symbol(&spec, CircleGrid::new(32).unwrap()).is_ok());
    }

    #[test]
    fn sampling_agrees_with_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let poly = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| {
            LaurentPoly::new((lo..=hi).map(|k| (k, c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))))
        };
        let p = 0.6;
        let spec = SymbolSpec::new(1, 2, vec![
            RationalEntry::Laurent(poly(&mut rng, -3, 2)),
            RationalEntry::Ratio { num: poly(&mut rng, 0, 2), den: LaurentPoly::new([(1, c(1.0, 0.0)), (0, c(-p, 0.0))]) },
        ]).unwrap();
        let grid = CircleGrid::new(256).unwrap();
        let g = sample_symbol(&spec, grid).unwrap();
        for _ in 0..64 {
            let j = rng.gen_range(0..grid.size());
            let z = grid.point(j);
            // direct evaluation of the formulas, independent of the entry code
            let e0: C64 = match spec.entry(0, 0) {
                RationalEntry::Laurent(q) => q.terms().map(|(k, a)| a * C64::from_polar(1.0, k as f64 * grid.theta(j))).sum(),
                _ => unreachable!(),
            };
            let e1 = match spec.entry(0, 1) {
                RationalEntry::Ratio { num, .. } => num.terms().map(|(k, a)| a * z.powi(k as i32)).sum::<C64>() / (z - p),
                _ => unreachable!(),
            };
            assert!((g.entry(0, 0)[j] - e0).norm() < 1e-12 * e0.norm().max(1.0));
            assert!((g.entry(0, 1)[j] - e1).norm() < 1e-12 * e1.norm().max(1.0));
        }
    }

    #[test]
    fn sampled_coefficients_decay_geometrically() {
        let p = 0.5;
        let spec = SymbolSpec::new(1, 1, vec![RationalEntry::Ratio {
            num: LaurentPoly::monomial(0, c(1.0, 0.0)),
            den: LaurentPoly::new([(1, c(1.0, 0.0)), (0, c(-p, 0.0))]),
        }]).unwrap();
        let grid = CircleGrid::new(128).unwrap();
        let coeffs = sample_symbol(&spec, grid).unwrap().transform_entries();
        // 1/(z - p) = Σ_{k≥1} p^{k-1} z̄^k
        for k in 1..30 {
            let got = coeffs[0].coeff(0, -k).norm();
            assert!((got - p.powi(k as i32 - 1)).abs() < 1e-14);
        }
        assert!(coeffs[0].coeff(0, 3).norm() < 1e-15);
    }

    #[test]
    fn unknown_builtin_is_an_error() {
        assert!(builtin_symbol("nope").is_err());
        for name in BUILTIN_NAMES {
            assert!(builtin_symbol(name).is_ok());
        }
    }
}

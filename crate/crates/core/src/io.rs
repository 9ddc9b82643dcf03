//! JSON input, the analysis pipeline, the report document and its SVG plot.

use std::fmt::Write as _;
use std::io;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::covering::{build_covering, build_ladder, default_epsilon_f, verify_covering, CellCovering, CoveringReport, EpsilonLadder};
use crate::error::{Error, Result};
use crate::factorization::{
    factor_roots, match_root_counts, relative_error_outside_cells, rough_factor_normalized, verify_error_bound,
    AnnulusReport, MatchReport, OutsideReport, RoughFactorization,
};
use crate::heights::{estimate_heights, newton_polygon_heights, HeightProfile};
use crate::oracle::{find_roots, reconstruction_error, RootFindConfig};
use crate::oscillatory::{
    phong_stein_bound, coefficient_bound, windowed_integral_default, ClusterSearch, PhongSteinBound, PolyPhase, CoefficientBound,
};
use crate::poly::{deflate_zero_roots, index_table, vieta_check, IndexTable, RootMultiset, SparsePolynomial, VietaReport};
use crate::tiers::{
    assign_roots, normalize_pivot, refine, stratify, tier_symmetric_residuals, verify_cluster_counts, ClusterReport,
    Refinement, TierAssignment, TierDecomposition, TierResidual, DEFAULT_EPSILON, DEFAULT_SEPARATION,
};

pub const SCHEMA: &str = "tierroots.report/1";

/// Oracle reconstruction tolerance used for the Vieta check.
pub const VIETA_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub separation: f64,
    /// Fine covering parameter; `min(1e-4, 1/min_gap)` when absent.
    pub epsilon_f: Option<f64>,
    /// Cluster ball radius, relative to the centre root.
    pub epsilon: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Accept a positive lowest exponent and divide out the zero roots.
    pub auto_deflate: bool,
    pub oracle: RootFindConfig,
    /// Sample points per circle in the error checks.
    pub samples: usize,
    /// When set, `|E|/|Ψ|` outside the cells above this value is a failure.
    pub max_relative_error: Option<f64>,
    pub oscillatory: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            separation: DEFAULT_SEPARATION,
            epsilon_f: None,
            epsilon: DEFAULT_EPSILON,
            gamma: 1.0,
            delta: 1e-3,
            auto_deflate: false,
            oracle: RootFindConfig::default(),
            samples: 64,
            max_relative_error: None,
            oscillatory: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub exponents: Vec<usize>,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub options: Options,
}

impl InputDocument {
    pub fn new(poly: &SparsePolynomial, options: Options) -> Self {
        Self { exponents: poly.exponents().to_vec(), coefficients: poly.coefficients().to_vec(), options }
    }

    pub fn polynomial(&self) -> Result<SparsePolynomial> {
        let at = |p: &str, m: String| Error::Parse { pointer: p.into(), message: m };
        if self.exponents.len() != self.coefficients.len() {
            return Err(at(
                "/coefficients",
                format!("{} coefficients for {} exponents", self.coefficients.len(), self.exponents.len()),
            ));
        }
        if self.exponents.is_empty() {
            return Err(at("/exponents", "empty".into()));
        }
        if let Some(i) = (1..self.exponents.len()).find(|&i| self.exponents[i] <= self.exponents[i - 1]) {
            return Err(at(&format!("/exponents/{i}"), "exponents must increase strictly".into()));
        }
        if self.exponents[0] != 0 && !self.options.auto_deflate {
            return Err(at("/exponents/0", "first exponent must be 0 unless options.auto_deflate is set".into()));
        }
        if let Some(i) = self.coefficients.iter().position(|c| !c.is_finite()) {
            return Err(at(&format!("/coefficients/{i}"), "not a finite number".into()));
        }
        if *self.coefficients.last().unwrap() == 0.0 {
            let i = self.coefficients.len() - 1;
            return Err(at(&format!("/coefficients/{i}"), "leading coefficient is zero".into()));
        }
        SparsePolynomial::from_terms(self.exponents.clone(), self.coefficients.clone())
            .map_err(|e| at("", e.to_string()))
    }
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => {
                let _ = write!(out, "/{index}");
            }
            Segment::Map { key } | Segment::Enum { variant: key } => {
                let _ = write!(out, "/{}", key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Unknown => {}
        }
    }
    out
}

/// Parses and validates an input document.
pub fn parse_document(text: &str) -> Result<InputDocument> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse { pointer: String::new(), message: e.to_string() })?;
    if !value.is_object() {
        return Err(Error::Parse { pointer: String::new(), message: "expected a JSON object".into() });
    }
    let doc: InputDocument = serde_path_to_error::deserialize(&value).map_err(|e| {
        let p = pointer(e.path());
        let msg = e.inner().to_string();
        Error::Parse { pointer: p, message: msg }
    })?;
    doc.polynomial()?;
    Ok(doc)
}

pub fn parse_input(text: &str) -> Result<(SparsePolynomial, Options)> {
    let doc = parse_document(text)?;
    Ok((doc.polynomial()?, doc.options))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub roots: RootMultiset,
    pub reconstruction_error: f64,
    pub conjugate_defect: f64,
    pub vieta: VietaReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSection {
    pub epsilon: f64,
    /// One report per tier against `L(T_r) = l_r`.
    pub tiers: Vec<ClusterReport>,
    /// Against the refined caps, when the refinement applies.
    pub refined: Option<Vec<ClusterReport>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringSection {
    pub ladder: EpsilonLadder,
    pub covering: Option<CellCovering>,
    pub verification: Option<CoveringReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSection {
    pub factorization: RoughFactorization,
    pub factor_roots: RootMultiset,
    pub cell_counts: Option<MatchReport>,
    pub annuli: Vec<AnnulusReport>,
    pub outside_cells: Option<OutsideReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowedValue {
    pub half_width: f64,
    pub value: Complex64,
    /// `|I_T|` over the coefficient bound.
    pub coefficient_ratio: f64,
    /// `|I_T|` over the cluster bound.
    pub cluster_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorySection {
    /// Set when the input cannot serve as `Φ'` (it needs `k_1 >= 2`).
    pub skipped: Option<String>,
    pub phase: Option<PolyPhase>,
    pub coefficient: Option<CoefficientBound>,
    pub cluster: Option<PhongSteinBound>,
    pub integrals: Vec<WindowedValue>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub input: InputDocument,
    pub zero_roots: usize,
    /// The input with zero roots divided out; everything below refers to it.
    pub polynomial: SparsePolynomial,
    pub index: IndexTable,
    pub heights: HeightProfile,
    pub newton_polygon_agrees: bool,
    pub tiers: TierDecomposition,
    pub refinement: Refinement,
    pub oracle: Option<OracleSection>,
    pub assignment: Option<TierAssignment>,
    pub tier_residuals: Option<Vec<TierResidual>>,
    pub clusters: Option<ClusterSection>,
    pub covering: Option<CoveringSection>,
    pub factorization: Option<FactorSection>,
    pub oscillatory: Option<OscillatorySection>,
    pub failures: Vec<String>,
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// An infrastructure error part way through, with what was computed so far.
#[derive(Debug)]
pub struct PipelineFailure {
    pub error: Error,
    pub partial: Option<Box<AnalysisReport>>,
}

impl From<Error> for PipelineFailure {
    fn from(error: Error) -> Self {
        Self { error, partial: None }
    }
}

impl std::fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for PipelineFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

fn same_profile(a: &HeightProfile, b: &HeightProfile) -> bool {
    a.alphas == b.alphas
        && a.gaps == b.gaps
        && a.etas.iter().zip(&b.etas).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()))
}

/// Runs every stage on `poly`. Verification failures land in
/// `report.failures`; only oracle breakdowns abort.
pub fn run_pipeline(poly: &SparsePolynomial, options: &Options) -> std::result::Result<AnalysisReport, PipelineFailure> {
    let (p, zero_roots) = deflate_zero_roots(poly)?;
    let index = index_table(&p);
    let heights = estimate_heights(&p)?;
    let newton_polygon_agrees = same_profile(&heights, &newton_polygon_heights(&p)?);
    let tiers = stratify(&heights, &index, options.separation)?;
    let (q, _) = normalize_pivot(&p);
    let refinement = refine(&q, options.gamma, options.delta, options.separation)?;
    let mut report = AnalysisReport {
        schema: SCHEMA.into(),
        input: InputDocument::new(poly, options.clone()),
        zero_roots,
        polynomial: p.clone(),
        index,
        heights,
        newton_polygon_agrees,
        tiers,
        refinement,
        oracle: None,
        assignment: None,
        tier_residuals: None,
        clusters: None,
        covering: None,
        factorization: None,
        oscillatory: None,
        failures: Vec::new(),
    };
    if !report.newton_polygon_agrees {
        report.failures.push("greedy heights differ from the Newton polygon".into());
    }
    let abort = |report: AnalysisReport, error: Error| PipelineFailure { error, partial: Some(Box::new(report)) };

    let roots = match find_roots(&p, &options.oracle) {
        Ok(r) => r,
        Err(e) => return Err(abort(report, e)),
    };
    let oracle = OracleSection {
        reconstruction_error: reconstruction_error(&p, &roots)?,
        conjugate_defect: roots.conjugate_defect(),
        vieta: vieta_check(&p, &roots, VIETA_TOLERANCE)?,
        roots,
    };
    if !oracle.vieta.passed {
        report.failures.push(format!("oracle roots fail the Vieta check at tolerance {VIETA_TOLERANCE:e}"));
    }
    let roots = oracle.roots.clone();
    report.oracle = Some(oracle);

    let assignment = assign_roots(&report.tiers, &roots)?;
    report.tier_residuals = Some(tier_symmetric_residuals(&assignment, &report.tiers)?);
    let tier_reports: Vec<ClusterReport> = report
        .tiers
        .tiers
        .iter()
        .zip(&assignment.tiers)
        .map(|(t, r)| verify_cluster_counts(r, options.epsilon, t.cluster_bound))
        .collect();
    for (r, c) in tier_reports.iter().enumerate() {
        if !c.passed {
            report.failures.push(format!("tier {}: {} roots in one cluster ball, cap {}", r + 1, c.max_count, c.cap));
        }
    }
    let refined = match &report.refinement {
        Refinement::Applicable(cls) => Some(
            assignment
                .tiers
                .iter()
                .enumerate()
                .filter_map(|(r, roots)| cls.cap(r).map(|cap| verify_cluster_counts(roots, options.epsilon, cap)))
                .collect::<Vec<_>>(),
        ),
        Refinement::NotApplicable { .. } => None,
    };
    if let Some(rs) = &refined {
        if rs.iter().any(|c| !c.passed) {
            report.failures.push("refined cluster cap exceeded".into());
        }
    }
    report.clusters = Some(ClusterSection { epsilon: options.epsilon, tiers: tier_reports, refined });

    let eps_f = options.epsilon_f.unwrap_or_else(|| default_epsilon_f(report.tiers.min_gap()));
    let ladder = build_ladder(p.l(), eps_f)?;
    let covering = match build_covering(&assignment.tiers, &report.tiers.heights(), &ladder) {
        Ok(c) => Some(c),
        Err(Error::StructuralViolation(msg)) => {
            report.failures.push(format!("covering: {msg}"));
            None
        }
        Err(e) => return Err(abort(report, e)),
    };
    let verification = covering.as_ref().map(verify_covering);
    if let Some(v) = &verification {
        if !v.passed {
            report.failures.extend(v.witnesses.iter().map(|w| format!("covering: {w}")));
        }
    }
    report.assignment = Some(assignment);

    let rf = rough_factor_normalized(&p, &report.tiers)?;
    let tilde = match factor_roots(&rf, &options.oracle) {
        Ok(r) => r,
        Err(e) => {
            report.covering = Some(CoveringSection { ladder, covering, verification, error: None });
            return Err(abort(report, e));
        }
    };
    let annuli = verify_error_bound(&p, &rf, options.samples, 8);
    let (cell_counts, outside_cells) = match &covering {
        Some(cov) => {
            let m = match_root_counts(&roots, &tilde, cov, p.l());
            if !m.equal {
                report.failures.push(format!(
                    "per-cell root counts differ: {:?} against {:?}",
                    m.psi_counts, m.tilde_counts
                ));
            }
            if !m.counts_in_range {
                report.failures.push("a cell holds no root or more than L roots".into());
            }
            let out = match relative_error_outside_cells(&p, &rf, cov, options.samples) {
                Ok(o) => Some(o),
                Err(e) => {
                    report.failures.push(format!("relative error sampling: {e}"));
                    None
                }
            };
            (Some(m), out)
        }
        None => (None, None),
    };
    if let (Some(limit), Some(o)) = (options.max_relative_error, &outside_cells) {
        if o.max_ratio > limit {
            report.failures.push(format!("|E|/|Psi| reaches {:.3e} outside the cells, limit {limit:e}", o.max_ratio));
        }
    }
    let error = verification.is_none().then(|| "no covering".to_string());
    report.covering = Some(CoveringSection { ladder, covering, verification, error });
    report.factorization =
        Some(FactorSection { factorization: rf, factor_roots: tilde, cell_counts, annuli, outside_cells });

    if options.oscillatory {
        report.oscillatory = Some(oscillatory_section(poly, &roots, zero_roots));
    }
    Ok(report)
}

fn oscillatory_section(poly: &SparsePolynomial, roots: &RootMultiset, zero_roots: usize) -> OscillatorySection {
    let mut sec = OscillatorySection { skipped: None, phase: None, coefficient: None, cluster: None, integrals: Vec::new() };
    let phase = match PolyPhase::from_derivative(poly) {
        Ok(ph) => ph,
        Err(e) => {
            sec.skipped = Some(e.to_string());
            return sec;
        }
    };
    let mut all = roots.roots.clone();
    if zero_roots > 0 {
        all.push((Complex64::new(0.0, 0.0), zero_roots));
    }
    let all = RootMultiset::new(all).expect("nonzero multiplicities");
    let radius = all.roots.iter().map(|r| r.0.norm()).fold(0.0, f64::max);
    let tb = coefficient_bound(&phase);
    let ps = phong_stein_bound(&all, phase.ys[phase.l() - 1], ClusterSearch::Auto);
    match (tb, ps) {
        (Ok(tb), Ok(ps)) => {
            let t0 = (1.5 * radius).max(1.0);
            for t in [t0, 2.0 * t0] {
                match windowed_integral_default(&phase, t) {
                    Ok(v) => sec.integrals.push(WindowedValue {
                        half_width: t,
                        value: v,
                        coefficient_ratio: v.norm() / tb.value,
                        cluster_ratio: v.norm() / ps.value,
                    }),
                    Err(e) => {
                        sec.skipped = Some(e.to_string());
                        break;
                    }
                }
            }
            sec.coefficient = Some(tb);
            sec.cluster = Some(ps);
        }
        (Err(e), _) | (_, Err(e)) => sec.skipped = Some(e.to_string()),
    }
    sec.phase = Some(phase);
    sec
}

/// Pretty printing with every float written as 17 significant digits.
struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialises `value` as indented JSON with 17-digit floats. The text is read
/// back and must reproduce `value`; that rejects non-finite numbers, which
/// would otherwise turn into `null`.
pub fn to_json<T: Serialize + DeserializeOwned + PartialEq>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let text = String::from_utf8(out).expect("serde_json writes UTF-8");
    let back: T = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("JSON does not read back: {e}")))?;
    if back != *value {
        return Err(Error::InvalidInput("JSON does not reproduce the value; non-finite number?".into()));
    }
    Ok(text)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Roots on a log-magnitude radial scale, cells as circles, one ring per tier
/// height, tiers colour-coded.
pub fn emit_svg(report: &AnalysisReport) -> String {
    const SIZE: f64 = 600.0;
    const R: f64 = 260.0;
    let c = SIZE / 2.0;
    let tiers: Vec<RootMultiset> = match &report.assignment {
        Some(a) => a.tiers.clone(),
        None => report.oracle.iter().map(|o| o.roots.clone()).collect(),
    };
    let mags: Vec<f64> = tiers
        .iter()
        .flat_map(|t| t.roots.iter().map(|r| r.0.norm()))
        .chain(report.tiers.heights())
        .filter(|m| *m > 0.0)
        .collect();
    let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min).log10();
    let hi = mags.iter().cloned().fold(f64::NEG_INFINITY, f64::max).log10();
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let rho = |m: f64| (m.log10() - lo + 0.5) / (hi - lo + 1.0) * R;
    let place = |z: Complex64| {
        let r = rho(z.norm());
        (c + r * z.arg().cos(), c - r * z.arg().sin())
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    for (r, h) in report.tiers.heights().iter().enumerate() {
        let colour = PALETTE[r % PALETTE.len()];
        let _ = writeln!(
            s,
            r#"<circle class="tier-ring" cx="{c:.3}" cy="{c:.3}" r="{:.3}" fill="none" stroke="{colour}" stroke-dasharray="4 4" stroke-opacity="0.5"/>"#,
            rho(*h)
        );
    }
    if let Some(cov) = report.covering.as_ref().and_then(|c| c.covering.as_ref()) {
        for cell in &cov.cells {
            let (x, y) = place(cell.center);
            // The log map scales a small disc of radius ρ about w by 1/(|w| ln 10).
            let rr = (cell.radius / (cell.center.norm() * std::f64::consts::LN_10)) / (hi - lo + 1.0) * R;
            let colour = PALETTE[cell.tier % PALETTE.len()];
            let _ = writeln!(
                s,
                r#"<circle class="cell" cx="{x:.3}" cy="{y:.3}" r="{:.3}" fill="none" stroke="{colour}"/>"#,
                rr.max(1.0)
            );
        }
    }
    for (r, t) in tiers.iter().enumerate() {
        let colour = PALETTE[r % PALETTE.len()];
        for &(z, m) in &t.roots {
            if z.norm() == 0.0 {
                continue;
            }
            let (x, y) = place(z);
            let _ = writeln!(
                s,
                r#"<circle class="root" cx="{x:.3}" cy="{y:.3}" r="{:.1}" fill="{colour}"><title>{:.6e}{:+.6e}i x{m}</title></circle>"#,
                2.5 + m as f64,
                z.re,
                z.im
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (SparsePolynomial, Options) {
        let opts = Options { separation: 10.0, epsilon_f: Some(2.5e-3), ..Options::default() };
        (SparsePolynomial::new(vec![0, 1, 2], vec![100.0, -101.0, 1.0]).unwrap(), opts)
    }

    #[test]
    fn parses_fixture() {
        let (p, o) = parse_input(r#"{"exponents":[0,1,2],"coefficients":[100,-101,1]}"#).unwrap();
        assert_eq!(p, fixture().0);
        assert_eq!(o, Options::default());
    }

    #[test]
    fn parse_error_pointers() {
        let ptr = |t: &str| match parse_input(t) {
            Err(Error::Parse { pointer, .. }) => pointer,
            other => panic!("{other:?}"),
        };
        assert_eq!(ptr(r#"{"exponents":[0,1,2],"coefficients":[100,-101]}"#), "/coefficients");
        assert_eq!(ptr(r#"{"exponents":[0,2,1],"coefficients":[1,1,1]}"#), "/exponents/2");
        assert_eq!(ptr(r#"{"exponents":[0,"a"],"coefficients":[1,1]}"#), "/exponents/1");
        assert_eq!(ptr(r#"{"exponents":[0,1],"coefficients":[1,1],"options":{"separation":"x"}}"#), "/options/separation");
        assert_eq!(ptr(r#"{"exponents":[0,1],"coefficients":[1,1],"options":{"oracle":{"tol":[]}}}"#), "/options/oracle/tol");
        assert_eq!(ptr(r#"{"exponents":[0,1],"coefficients":[1,1],"extra":1}"#), "/extra");
        assert_eq!(ptr(r#"{"exponents":[2,3],"coefficients":[1,1]}"#), "/exponents/0");
        assert_eq!(ptr(r#"[1]"#), "");
    }

    #[test]
    fn auto_deflate() {
        let (p, _) =
            parse_input(r#"{"exponents":[2,3],"coefficients":[-1,1],"options":{"auto_deflate":true}}"#).unwrap();
        let (q, m0) = deflate_zero_roots(&p).unwrap();
        assert_eq!((q.exponents(), m0), (&[0usize, 1][..], 2));
    }

    #[test]
    fn fixture_report() {
        let (p, o) = fixture();
        let rep = run_pipeline(&p, &o).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.heights.etas, vec![101.0, 100.0 / 101.0]);
        assert_eq!(rep.tiers.sizes(), vec![1, 1]);
        let f = rep.factorization.as_ref().unwrap();
        assert_eq!(f.factorization.factors[0].coefficients(), &[-101.0, 1.0]);
        assert_eq!(f.cell_counts.as_ref().unwrap().psi_counts, vec![1, 1]);
        let svg = emit_svg(&rep);
        assert_eq!(svg.matches(r#"class="root""#).count(), 2);
        assert_eq!(svg.matches(r#"class="cell""#).count(), 2);
        assert_eq!(svg.matches(r#"class="tier-ring""#).count(), 2);
    }

    #[test]
    fn round_trip_and_determinism() {
        let (p, o) = fixture();
        let a = to_json(&run_pipeline(&p, &o).unwrap()).unwrap();
        let b = to_json(&run_pipeline(&p, &o).unwrap()).unwrap();
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        let echoed = v["input"].to_string();
        let doc = parse_document(&echoed).unwrap();
        assert_eq!(doc, InputDocument::new(&p, o));
        let odd = InputDocument {
            exponents: vec![0, 3],
            coefficients: vec![0.1 + 0.2, std::f64::consts::PI],
            options: Options::default(),
        };
        assert_eq!(parse_document(&to_json(&odd).unwrap()).unwrap(), odd);
    }

    #[test]
    fn seventeen_digits() {
        let s = to_json(&vec![0.1f64, 1e300]).unwrap();
        assert!(s.contains("1.0000000000000001e-1") && s.contains("1.0000000000000001e300"), "{s}");
        assert!(to_json(&vec![f64::NAN]).is_err());
    }

    #[test]
    fn single_tier_nine_roots() {
        let p = SparsePolynomial::new(vec![0, 9], vec![-512.0, 1.0]).unwrap();
        let rep = run_pipeline(&p, &Options::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert_eq!(rep.tiers.len(), 1);
        let cov = rep.covering.as_ref().unwrap().covering.as_ref().unwrap();
        assert_eq!(cov.cells.len(), 9);
        assert!(cov.cells.iter().all(|c| c.b == 1));
        assert_eq!(rep.factorization.as_ref().unwrap().factorization.factors[0], p);
        let svg = emit_svg(&rep);
        assert_eq!(svg.matches(r#"class="root""#).count(), 9);
        assert_eq!(svg.matches(r#"class="tier-ring""#).count(), 1);
    }

    #[test]
    fn height_family_double_cells() {
        let case = crate::corpus::height_family(5, &[1e4, 1.0], &[2, 1]).unwrap();
        let rep = run_pipeline(&case.poly, &Options::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let cov = rep.covering.as_ref().unwrap().covering.as_ref().unwrap();
        let b: Vec<(usize, usize)> = cov.cells.iter().map(|c| (c.tier, c.b)).collect();
        assert_eq!(b.iter().filter(|x| **x == (0, 2)).count(), 5);
        assert_eq!(b.iter().filter(|x| **x == (1, 1)).count(), 5);
        assert_eq!(emit_svg(&rep).matches(r#"class="tier-ring""#).count(), 2);
    }

    #[test]
    fn oscillatory_section_runs() {
        let p = SparsePolynomial::new(vec![0, 2], vec![0.5, 1.0]).unwrap();
        let o = Options { oscillatory: true, ..Options::default() };
        let rep = run_pipeline(&p, &o).unwrap();
        let osc = rep.oscillatory.unwrap();
        assert!(osc.skipped.is_none());
        assert_eq!(osc.integrals.len(), 2);
        let fixture = run_pipeline(&fixture().0, &Options { oscillatory: true, ..fixture().1 }).unwrap();
        assert!(fixture.oscillatory.unwrap().skipped.is_some());
    }
}

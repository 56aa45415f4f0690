//! Constructive bracketing covers and brute-force VC machinery.
//!
//! Brackets for the half-line indicator class are built from quantile cuts:
//! with cut points t_0 < … < t_m chosen so each F-gap is at most ε², the
//! bracket `[1{·≤t_{k−1}}, 1{·≤t_k}]` has L2(P) size √gap ≤ ε and every
//! half-line sits inside one of them (in the almost-everywhere order of
//! L2(P)). The emitted count is a constructive upper bound on the minimal
//! bracketing number, not the minimum itself.
//!
//! Shattering is decided by exhaustive enumeration over finitely parameterized
//! class oracles; the VC index is the smallest cardinality at which no point
//! set is shattered (so half-lines get index 2: singletons are shattered,
//! no pair is, since the upper point alone can never be picked out).

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gcip::{Boundedness, GcipReport};
use crate::procgen::MarginalDist;

/// Enumeration guard for `shatter_check` (2^|points| subsets).
pub const SHATTER_MAX_POINTS: usize = 22;

/// Enumeration guard for `vc_index`.
pub const VC_MAX_CARDINALITY: u32 = 12;

/// Class identifier for half-line indicators; shared with gcip reports.
pub const HALF_LINE_CLASS: &str = "half_line_indicators";

// ---------------------------------------------------------------------------
// Set-class oracles
// ---------------------------------------------------------------------------

/// A finitely parameterized class of subsets of the real line.
///
/// Shattering over the real line is approximated by shattering over the
/// declared parameter grid; the grids produced by the `covering`
/// constructors realize every pick-out pattern the full class can achieve on
/// the given points.
pub trait SetClass {
    fn class_id(&self) -> &str;
    fn member_count(&self) -> usize;
    fn contains(&self, member: usize, x: f64) -> bool;
    fn member_desc(&self, member: usize) -> String;
}

/// Half-lines `(-∞, c]` over a cut grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLines {
    pub cuts: Vec<f64>,
}

impl HalfLines {
    /// Cut grid realizing every achievable pick-out pattern on `points`:
    /// one cut below the minimum plus one at each point.
    pub fn covering(points: &[f64]) -> Self {
        let mut cuts: Vec<f64> = points.to_vec();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let below = cuts.first().copied().unwrap_or(0.0) - 1.0;
        cuts.insert(0, below);
        HalfLines { cuts }
    }
}

impl SetClass for HalfLines {
    fn class_id(&self) -> &str {
        "half_lines"
    }
    fn member_count(&self) -> usize {
        self.cuts.len()
    }
    fn contains(&self, member: usize, x: f64) -> bool {
        x <= self.cuts[member]
    }
    fn member_desc(&self, member: usize) -> String {
        format!("(-inf, {}]", self.cuts[member])
    }
}

/// Closed intervals `[a, b]` over an endpoint grid (plus one empty member).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intervals {
    pub endpoints: Vec<f64>,
}

impl Intervals {
    pub fn covering(points: &[f64]) -> Self {
        let mut endpoints: Vec<f64> = points.to_vec();
        endpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        endpoints.dedup();
        Intervals { endpoints }
    }

    fn pair(&self, member: usize) -> Option<(f64, f64)> {
        if member == 0 {
            return None; // empty set
        }
        let m = member - 1;
        let k = self.endpoints.len();
        let (i, j) = (m / k, m % k);
        if i <= j {
            Some((self.endpoints[i], self.endpoints[j]))
        } else {
            None
        }
    }
}

impl SetClass for Intervals {
    fn class_id(&self) -> &str {
        "closed_intervals"
    }
    fn member_count(&self) -> usize {
        self.endpoints.len() * self.endpoints.len() + 1
    }
    fn contains(&self, member: usize, x: f64) -> bool {
        match self.pair(member) {
            Some((a, b)) => a <= x && x <= b,
            None => false,
        }
    }
    fn member_desc(&self, member: usize) -> String {
        match self.pair(member) {
            Some((a, b)) => format!("[{a}, {b}]"),
            None => "{}".to_string(),
        }
    }
}

/// The full power set of a finite universe; shatters everything.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerClass {
    pub universe: Vec<f64>,
}

impl SetClass for PowerClass {
    fn class_id(&self) -> &str {
        "power_set"
    }
    fn member_count(&self) -> usize {
        1usize << self.universe.len().min(20)
    }
    fn contains(&self, member: usize, x: f64) -> bool {
        self.universe
            .iter()
            .position(|&u| u == x)
            .is_some_and(|i| member & (1 << i) != 0)
    }
    fn member_desc(&self, member: usize) -> String {
        let elems: Vec<String> = self
            .universe
            .iter()
            .enumerate()
            .filter(|(i, _)| member & (1 << i) != 0)
            .map(|(_, u)| u.to_string())
            .collect();
        format!("{{{}}}", elems.join(", "))
    }
}

// ---------------------------------------------------------------------------
// Shattering and VC index
// ---------------------------------------------------------------------------

/// Decides whether `points` is shattered: every subset picked out by some
/// class member. Returns the first missing subset (by mask order) otherwise.
pub fn shatter_check(
    class: &dyn SetClass,
    points: &[f64],
) -> Result<(bool, Option<Vec<f64>>)> {
    if points.is_empty() {
        return Err(LabError::Validation("shatter_check needs points".into()));
    }
    if points.len() > SHATTER_MAX_POINTS {
        return Err(LabError::Feasibility(format!(
            "shatter_check enumerates 2^{} subsets; cap is {SHATTER_MAX_POINTS} points",
            points.len()
        )));
    }
    let achieved = achievable_masks(class, points);
    for mask in 0u64..(1u64 << points.len()) {
        if !achieved.contains(&mask) {
            let witness: Vec<f64> = points
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            return Ok((false, Some(witness)));
        }
    }
    Ok((true, None))
}

fn achievable_masks(class: &dyn SetClass, points: &[f64]) -> std::collections::HashSet<u64> {
    let mut achieved = std::collections::HashSet::new();
    for m in 0..class.member_count() {
        let mut mask = 0u64;
        for (i, &p) in points.iter().enumerate() {
            if class.contains(m, p) {
                mask |= 1 << i;
            }
        }
        achieved.insert(mask);
    }
    achieved
}

/// For a shattered set, one witnessing member per subset.
fn pickout_certificates(class: &dyn SetClass, points: &[f64]) -> Vec<(Vec<f64>, String)> {
    let mut certs = Vec::new();
    'subset: for mask in 0u64..(1u64 << points.len()) {
        for m in 0..class.member_count() {
            let mut got = 0u64;
            for (i, &p) in points.iter().enumerate() {
                if class.contains(m, p) {
                    got |= 1 << i;
                }
            }
            if got == mask {
                let subset: Vec<f64> = points
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &p)| p)
                    .collect();
                certs.push((subset, class.member_desc(m)));
                continue 'subset;
            }
        }
    }
    certs
}

/// A shattered example set with its pick-out certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterWitness {
    pub cardinality: u32,
    pub points: Vec<f64>,
    /// (subset, member that picks it out)
    pub certificates: Vec<(Vec<f64>, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VcIndexResult {
    Index(u32),
    /// Every cardinality up to the cap had a shattered set.
    NotFound { up_to: u32 },
}

/// Brute-force VC determination over a declared finite universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VcReport {
    pub class_id: String,
    pub universe: Vec<f64>,
    pub index: VcIndexResult,
    pub shattering_witnesses: Vec<ShatterWitness>,
    /// Shattering over the reals is approximated on this universe grid.
    pub note: String,
}

/// Smallest cardinality at which no subset of the universe is shattered.
pub fn vc_index(class: &dyn SetClass, universe: &[f64], max_n: u32) -> Result<VcReport> {
    if max_n == 0 || universe.is_empty() {
        return Err(LabError::Validation(
            "vc_index needs a universe and max_n >= 1".into(),
        ));
    }
    if max_n > VC_MAX_CARDINALITY {
        return Err(LabError::Feasibility(format!(
            "vc_index caps at cardinality {VC_MAX_CARDINALITY}, got {max_n}"
        )));
    }
    let mut witnesses = Vec::new();
    for n in 1..=max_n.min(universe.len() as u32) {
        let mut found = None;
        for subset in combinations(universe, n as usize) {
            let (shattered, _) = shatter_check(class, &subset)?;
            if shattered {
                found = Some(subset);
                break;
            }
        }
        match found {
            Some(points) => {
                let certificates = pickout_certificates(class, &points);
                witnesses.push(ShatterWitness {
                    cardinality: n,
                    points,
                    certificates,
                });
            }
            None => {
                return Ok(VcReport {
                    class_id: class.class_id().to_string(),
                    universe: universe.to_vec(),
                    index: VcIndexResult::Index(n),
                    shattering_witnesses: witnesses,
                    note: format!("exhaustive over all {n}-subsets of the declared universe"),
                });
            }
        }
    }
    Ok(VcReport {
        class_id: class.class_id().to_string(),
        universe: universe.to_vec(),
        index: VcIndexResult::NotFound { up_to: max_n },
        shattering_witnesses: witnesses,
        note: "shattered sets found at every cardinality up to the cap".into(),
    })
}

/// All `n`-element subsets, in lexicographic index order.
fn combinations(items: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    if n == 0 || n > items.len() {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // Advance the combination counter.
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - n {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Bracketing covers
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BracketMetric {
    /// Size = √(F-gap): the L2(P) distance between indicator bounds.
    L2P,
    /// Size = F-gap: the set-measure distance.
    Abs,
}

/// Lower/upper bound of a half-line bracket, as a cut point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutPoint {
    NegInf,
    At(f64),
    PosInf,
}

impl CutPoint {
    fn cdf(&self, marginal: &MarginalDist) -> f64 {
        match *self {
            CutPoint::NegInf => 0.0,
            CutPoint::At(x) => marginal.cdf(x),
            CutPoint::PosInf => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: CutPoint,
    pub upper: CutPoint,
    /// Size in the declared metric.
    pub size: f64,
}

/// A constructive bracket cover of the half-line indicator class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketCover {
    pub class_id: String,
    pub epsilon: f64,
    pub metric: BracketMetric,
    pub brackets: Vec<Bracket>,
    pub count: usize,
    /// The count upper-bounds the minimal bracketing number.
    pub constructive_upper_bound: bool,
}

/// Quantile-cut bracket cover of `{1{·≤x} : x ∈ ℝ}` in the L2(P) metric.
///
/// Continuous F: ⌈1/ε²⌉ equal F-gaps. Discrete F: greedy merge of the
/// finitely many indicator equivalence classes, at most (atoms + 1) brackets.
pub fn bracket_halflines(marginal: &MarginalDist, epsilon: f64) -> Result<BracketCover> {
    bracket_halflines_metric(marginal, epsilon, BracketMetric::L2P)
}

/// Same construction with a selectable metric (gap target ε² for L2, ε for
/// the set-measure metric).
pub fn bracket_halflines_metric(
    marginal: &MarginalDist,
    epsilon: f64,
    metric: BracketMetric,
) -> Result<BracketCover> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(LabError::Validation(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let gap_target = match metric {
        BracketMetric::L2P => epsilon * epsilon,
        BracketMetric::Abs => epsilon,
    };
    let size_of = |gap: f64| match metric {
        BracketMetric::L2P => gap.max(0.0).sqrt(),
        BracketMetric::Abs => gap.max(0.0),
    };

    let brackets = match marginal.atoms() {
        None => {
            // Continuous F: count equal quantile gaps of mass 1/count <= ε².
            let count = (1.0 / gap_target).ceil().max(1.0) as usize;
            let cut_at = |p: f64| continuous_quantile(marginal, p);
            let mut brackets = Vec::with_capacity(count);
            for k in 0..count {
                let lower = if k == 0 {
                    CutPoint::NegInf
                } else {
                    CutPoint::At(cut_at(k as f64 / count as f64))
                };
                let upper = if k == count - 1 {
                    CutPoint::PosInf
                } else {
                    CutPoint::At(cut_at((k + 1) as f64 / count as f64))
                };
                let gap = upper.cdf(marginal) - lower.cdf(marginal);
                brackets.push(Bracket {
                    lower,
                    upper,
                    size: size_of(gap),
                });
            }
            brackets
        }
        Some(atoms) => {
            // Indicator equivalence classes sit at cumulative levels
            // 0 = c_0 < c_1 < ... < c_J = 1; greedily merge consecutive
            // classes while the F-gap stays within the target.
            let mut cuts: Vec<(CutPoint, f64)> = vec![(CutPoint::NegInf, 0.0)];
            for &(a, cum) in &atoms {
                cuts.push((CutPoint::At(a), cum));
            }
            let mut brackets = Vec::new();
            let mut start = 0usize;
            while start < cuts.len() {
                let mut end = start;
                while end + 1 < cuts.len() && cuts[end + 1].1 - cuts[start].1 <= gap_target {
                    end += 1;
                }
                let gap = cuts[end].1 - cuts[start].1;
                brackets.push(Bracket {
                    lower: cuts[start].0,
                    upper: cuts[end].0,
                    size: size_of(gap),
                });
                start = end + 1;
            }
            brackets
        }
    };

    Ok(BracketCover {
        class_id: HALF_LINE_CLASS.to_string(),
        epsilon,
        metric,
        count: brackets.len(),
        brackets,
        constructive_upper_bound: true,
    })
}

/// Quantile of a continuous marginal by bisection on the exact CDF.
fn continuous_quantile(marginal: &MarginalDist, p: f64) -> f64 {
    let (mut lo, mut hi) = marginal.support_hull();
    // Widen until the hull brackets the target mass.
    while marginal.cdf(lo) > p {
        lo -= (hi - lo).abs().max(1.0);
    }
    while marginal.cdf(hi) < p {
        hi += (hi - lo).abs().max(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if marginal.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Independent re-verification of a cover: every test member is contained in
/// some bracket (in the a.e. order under F) and every bracket size recomputed
/// from F stays within ε (plus float tolerance).
pub fn verify_cover(cover: &BracketCover, marginal: &MarginalDist, test_xs: &[f64]) -> bool {
    let tol = 1e-12;
    for b in &cover.brackets {
        let gap = b.upper.cdf(marginal) - b.lower.cdf(marginal);
        if gap < -tol {
            return false;
        }
        let size = match cover.metric {
            BracketMetric::L2P => gap.max(0.0).sqrt(),
            BracketMetric::Abs => gap.max(0.0),
        };
        if size > cover.epsilon + tol || (size - b.size).abs() > 1e-9 {
            return false;
        }
    }
    // Membership: mass(member > upper) = max(0, F(x) − F(upper)) and
    // mass(lower > member) = max(0, F(lower) − F(x)) must both vanish.
    test_xs.iter().all(|&x| {
        let fx = marginal.cdf(x);
        cover.brackets.iter().any(|b| {
            fx - b.upper.cdf(marginal) <= tol && b.lower.cdf(marginal) - fx <= tol
        })
    })
}

/// Default grid of class parameters for cover verification.
pub fn default_test_grid(marginal: &MarginalDist, count: usize) -> Vec<f64> {
    let (lo, hi) = marginal.support_hull();
    let (lo, hi) = (lo - 1.0, hi + 1.0);
    let mut grid: Vec<f64> = (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect();
    if let Some(atoms) = marginal.atoms() {
        for (a, _) in atoms {
            grid.push(a);
        }
    }
    grid
}

// ---------------------------------------------------------------------------
// VC entropy bound and composition verdict
// ---------------------------------------------------------------------------

/// The classical entropy bound `K·I·(4e)^I·(1/ε)^{r(I−1)}` for a VC class of
/// index I; the constants K > 0 and r > 1 are supplied by the caller.
pub fn vc_entropy_bound(index: u32, epsilon: f64, k: f64, r: f64) -> Result<f64> {
    if index < 1 {
        return Err(LabError::Validation("index must be >= 1".into()));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(LabError::Validation(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if !(k > 0.0) {
        return Err(LabError::Validation(format!("K must be positive, got {k}")));
    }
    if !(r > 1.0) {
        return Err(LabError::Validation(format!("r must exceed 1, got {r}")));
    }
    let i = index as f64;
    let four_e = 4.0 * std::f64::consts::E;
    Ok(k * i * four_e.powf(i) * (1.0 / epsilon).powf(r * (i - 1.0)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GcVerdictKind {
    SufficientConditionsVerified,
    NotVerified { failing: Vec<String> },
}

impl std::fmt::Display for GcVerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GcVerdictKind::SufficientConditionsVerified => {
                write!(f, "SUFFICIENT_CONDITIONS_VERIFIED")
            }
            GcVerdictKind::NotVerified { failing } => {
                write!(f, "NOT_VERIFIED({})", failing.join("+"))
            }
        }
    }
}

/// Composition of the two sufficient conditions: finite bracketing entropy at
/// every requested ε, and bounded variance growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcVerdict {
    pub verdict: GcVerdictKind,
    pub class_id: String,
    pub process_label: String,
    /// (condition, pass, detail)
    pub checklist: Vec<(String, bool, String)>,
    pub note: String,
}

/// Combines bracket covers with a variance-growth report into a verdict.
///
/// This is a finite-scale check of sufficient (not necessary) conditions; the
/// verdict says whether the checklist verified, never that convergence fails.
pub fn gc_verdict(covers: &[BracketCover], report: &GcipReport) -> Result<GcVerdict> {
    if covers.is_empty() {
        return Err(LabError::Validation(
            "gc_verdict needs at least one bracket cover".into(),
        ));
    }
    for c in covers {
        if c.class_id != report.class_id {
            return Err(LabError::Validation(format!(
                "class mismatch: cover is for '{}', report is for '{}'",
                c.class_id, report.class_id
            )));
        }
    }
    let bracketing_ok = covers.iter().all(|c| c.count >= 1);
    let gcip_ok = report.bounded_verdict == Boundedness::Bounded;

    let eps_list: Vec<String> = covers.iter().map(|c| format!("{}", c.epsilon)).collect();
    let checklist = vec![
        (
            "bracketing_entropy_finite".to_string(),
            bracketing_ok,
            format!(
                "finite covers at epsilon in [{}], counts [{}]",
                eps_list.join(", "),
                covers
                    .iter()
                    .map(|c| c.count.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        ),
        (
            "variance_growth_bounded".to_string(),
            gcip_ok,
            format!(
                "verdict {} with max-curve slope {:.4} (tol {})",
                report.bounded_verdict, report.s1_slope, report.slope_tol
            ),
        ),
    ];

    let mut failing = Vec::new();
    if !bracketing_ok {
        failing.push("bracketing".to_string());
    }
    if !gcip_ok {
        failing.push("gcip".to_string());
    }
    let verdict = if failing.is_empty() {
        GcVerdictKind::SufficientConditionsVerified
    } else {
        GcVerdictKind::NotVerified { failing }
    };
    Ok(GcVerdict {
        verdict,
        class_id: report.class_id.clone(),
        process_label: report.source_label.clone(),
        checklist,
        note: "finite-scale check of sufficient (not necessary) conditions".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_lines_cannot_pick_out_the_upper_point() {
        let class = HalfLines::covering(&[1.0, 2.0]);
        let (shattered, missing) = shatter_check(&class, &[1.0, 2.0]).unwrap();
        assert!(!shattered);
        assert_eq!(missing.unwrap(), vec![2.0]);
    }

    #[test]
    fn half_lines_shatter_singletons() {
        let class = HalfLines::covering(&[3.0]);
        let (shattered, missing) = shatter_check(&class, &[3.0]).unwrap();
        assert!(shattered);
        assert!(missing.is_none());
    }

    #[test]
    fn intervals_miss_the_outer_pair() {
        let class = Intervals::covering(&[1.0, 2.0, 3.0]);
        let (shattered, missing) = shatter_check(&class, &[1.0, 2.0, 3.0]).unwrap();
        assert!(!shattered);
        assert_eq!(missing.unwrap(), vec![1.0, 3.0]);
    }

    #[test]
    fn shatter_monotone_under_supersets() {
        // A superset of a non-shattered set is non-shattered.
        let class = HalfLines::covering(&[0.0, 1.0, 2.0, 3.0]);
        let (s2, _) = shatter_check(&class, &[1.0, 2.0]).unwrap();
        assert!(!s2);
        let (s3, _) = shatter_check(&class, &[1.0, 2.0, 3.0]).unwrap();
        assert!(!s3);
    }

    #[test]
    fn vc_indices_of_the_standard_classes() {
        let universe: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let half = vc_index(&HalfLines::covering(&universe), &universe, 5).unwrap();
        assert_eq!(half.index, VcIndexResult::Index(2));
        assert_eq!(half.shattering_witnesses.len(), 1);
        assert_eq!(half.shattering_witnesses[0].cardinality, 1);

        let ivals = vc_index(&Intervals::covering(&universe), &universe, 5).unwrap();
        assert_eq!(ivals.index, VcIndexResult::Index(3));

        let small: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let power = vc_index(&PowerClass { universe: small.clone() }, &small, 4).unwrap();
        assert_eq!(power.index, VcIndexResult::NotFound { up_to: 4 });
    }

    #[test]
    fn vc_witnesses_certify_every_subset() {
        let universe: Vec<f64> = (1..=6).map(|i| i as f64).collect();
        let report = vc_index(&Intervals::covering(&universe), &universe, 4).unwrap();
        for w in &report.shattering_witnesses {
            assert_eq!(w.certificates.len(), 1 << w.points.len());
        }
    }

    #[test]
    fn vc_feasibility_guard() {
        let u = vec![1.0, 2.0];
        assert!(matches!(
            vc_index(&HalfLines::covering(&u), &u, 13),
            Err(LabError::Feasibility(_))
        ));
    }

    #[test]
    fn bracket_cover_of_continuous_uniform() {
        let marginal = MarginalDist::Uniform { lo: 0.0, hi: 1.0 };
        let cover = bracket_halflines(&marginal, 0.5).unwrap();
        assert_eq!(cover.count, 4);
        for b in &cover.brackets {
            assert!(b.size <= 0.5 + 1e-12);
        }
        assert!(verify_cover(&cover, &marginal, &default_test_grid(&marginal, 10_000)));
    }

    #[test]
    fn huge_epsilon_gives_single_bracket() {
        let marginal = MarginalDist::Uniform { lo: 0.0, hi: 1.0 };
        let cover = bracket_halflines(&marginal, 1.5).unwrap();
        assert_eq!(cover.count, 1);
        assert_eq!(cover.brackets[0].lower, CutPoint::NegInf);
        assert_eq!(cover.brackets[0].upper, CutPoint::PosInf);
        assert_abs_diff_eq!(cover.brackets[0].size, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn discrete_cover_uses_degenerate_brackets() {
        let marginal = MarginalDist::FiniteAtoms {
            atoms: vec![0.0, 1.0],
            masses: vec![0.4, 0.6],
        };
        let cover = bracket_halflines(&marginal, 0.5).unwrap();
        assert!(cover.count <= 3);
        assert!(verify_cover(&cover, &marginal, &default_test_grid(&marginal, 1000)));
        // Larger epsilon absorbs the 0.4 atom.
        let wide = bracket_halflines(&marginal, 0.8).unwrap();
        assert!(wide.count < cover.count);
        assert!(verify_cover(&wide, &marginal, &default_test_grid(&marginal, 1000)));
    }

    #[test]
    fn normal_cover_verifies_against_integration() {
        let marginal = MarginalDist::Normal { mean: 0.0, sd: 1.0 };
        let cover = bracket_halflines(&marginal, 0.3).unwrap();
        assert_eq!(cover.count, (1.0f64 / 0.09).ceil() as usize);
        assert!(verify_cover(&cover, &marginal, &default_test_grid(&marginal, 10_000)));
    }

    #[test]
    fn abs_metric_changes_the_gap_target() {
        let marginal = MarginalDist::Uniform { lo: 0.0, hi: 1.0 };
        let cover = bracket_halflines_metric(&marginal, 0.5, BracketMetric::Abs).unwrap();
        assert_eq!(cover.count, 2);
        assert!(verify_cover(&cover, &marginal, &default_test_grid(&marginal, 1000)));
    }

    #[test]
    fn gc_verdict_validates_inputs() {
        use crate::gcip::{gcip_scan, GcipMode, GcipParams, GcipSource};
        use crate::procgen::{Marginal, ProcessKind, ProcessSpec};
        let spec = ProcessSpec::new(
            ProcessKind::Iid(Marginal::Uniform { lo: 0.0, hi: 1.0 }),
            "iid",
        )
        .unwrap();
        let report = gcip_scan(
            &GcipSource::Process { spec: spec.clone(), seed: 0 },
            &GcipParams {
                delta: 1.0,
                q_max: 16,
                x_grid: vec![0.5],
                mode: GcipMode::ExactMarkov,
            },
            None,
        )
        .unwrap();
        // Empty cover list is a validation error.
        assert!(matches!(gc_verdict(&[], &report), Err(LabError::Validation(_))));
        // Mismatched class identifiers are rejected.
        let mut cover = bracket_halflines(&spec.marginal_dist(), 0.5).unwrap();
        cover.class_id = "something_else".into();
        assert!(matches!(
            gc_verdict(&[cover], &report),
            Err(LabError::Validation(_))
        ));
        // Matching inputs compose.
        let good = bracket_halflines(&spec.marginal_dist(), 0.5).unwrap();
        let verdict = gc_verdict(&[good], &report).unwrap();
        assert_eq!(verdict.verdict, GcVerdictKind::SufficientConditionsVerified);
        assert_eq!(verdict.verdict.to_string(), "SUFFICIENT_CONDITIONS_VERIFIED");
    }

    #[test]
    fn entropy_bound_examples() {
        // Index 1: exponent vanishes, bound is K·4e for any ε.
        let e = std::f64::consts::E;
        for eps in [0.1, 0.5, 1.0] {
            assert_abs_diff_eq!(
                vc_entropy_bound(1, eps, 2.0, 1.5).unwrap(),
                2.0 * 4.0 * e,
                epsilon = 1e-10
            );
        }
        let b = vc_entropy_bound(2, 0.5, 1.0, 2.0).unwrap();
        assert_abs_diff_eq!(b, 2.0 * (4.0 * e) * (4.0 * e) * 4.0, epsilon = 1e-9);
        // Nonincreasing in ε.
        assert!(vc_entropy_bound(3, 0.2, 1.0, 2.0).unwrap() >= vc_entropy_bound(3, 0.4, 1.0, 2.0).unwrap());
        assert!(vc_entropy_bound(2, 0.5, 1.0, 1.0).is_err());
        assert!(vc_entropy_bound(2, 0.0, 1.0, 2.0).is_err());
    }
}

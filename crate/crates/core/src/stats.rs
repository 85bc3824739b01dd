//! Association matrices, validity statistics, and descriptive effect sizes.
//!
//! Sample statistics use the (n-1) standard deviation throughout.

use std::sync::Arc;

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::party::{PartyId, PartyRegistry, StanceMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} pairs, got {got}")]
    TooFewPairs { need: usize, got: usize },
    #[error("zero variance: statistic undefined on (near-)constant input")]
    ZeroVariance,
    #[error("input lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("association matrices cover different party sets")]
    PartyMismatch,
    #[error("parties '{a}' and '{b}' share fewer than {need} defined entries")]
    InsufficientOverlap { a: String, b: String, need: usize },
    #[error("unknown bias label '{0}'")]
    UnknownLabel(String),
    #[error("association needs at least 2 parties")]
    TooFewParties,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n-1 denominator).
fn sample_sd(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Pearson correlation coefficient over aligned samples.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewPairs {
            need: 3,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// Average ranks (1-based); ties share the mean of the ranks they span.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewPairs {
            need: 3,
            got: x.len(),
        });
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Standardize to mean 0, sample SD 1.
pub fn z_transform(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewPairs {
            need: 2,
            got: values.len(),
        });
    }
    let m = mean(values);
    let sd = sample_sd(values);
    if sd == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(values.iter().map(|v| (v - m) / sd).collect())
}

/// Numeric code for the five ordinal bias labels: left -2, left-center -1,
/// least biased 0, right-center +1, right +2.
pub fn ordinal_from_label(label: &str) -> Result<i32, StatsError> {
    let normalized: String = label
        .trim()
        .to_lowercase()
        .chars()
        .map(|c| if c == '_' || c == '-' { ' ' } else { c })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ");
    match normalized.as_str() {
        "left" => Ok(-2),
        "left center" => Ok(-1),
        "least biased" => Ok(0),
        "right center" => Ok(1),
        "right" => Ok(2),
        _ => Err(StatsError::UnknownLabel(label.to_string())),
    }
}

/// First-principal-component scores of two scales.
///
/// Both columns are z-transformed; for two standardized variables the first
/// eigenvector of the 2x2 correlation matrix is (1, 1)/sqrt(2), so the
/// unit-variance component scores are `(z(x) + z(y)) / sqrt(2 (1 + r))`.
/// The sign convention makes the component correlate positively with `x`.
/// In the degenerate case r = -1 the shared direction vanishes and the
/// component is defined along `x`, i.e. the scores are `z(x)`.
pub fn pc1_two_scales(x: &[f64], y: &[f64]) -> Result<Vec<f64>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewPairs {
            need: 3,
            got: x.len(),
        });
    }
    let zx = z_transform(x)?;
    let zy = z_transform(y)?;
    let r = pearson(x, y)?;
    if 1.0 + r <= 1e-12 {
        return Ok(zx);
    }
    let denom = (2.0 * (1.0 + r)).sqrt();
    Ok(zx.iter().zip(&zy).map(|(a, b)| (a + b) / denom).collect())
}

/// Paired effect size with its 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectSize {
    pub d_av: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Effect size for paired samples: mean(pre - post) divided by the average
/// of the two sample SDs.
///
/// CI: the 95% central-t interval for the mean paired difference,
/// `mean_diff +- t(0.975, n-1) * sd_diff / sqrt(n)`, rescaled by the same
/// averaged-SD standardizer. This is the straightforward paired-design
/// interval; it ignores the sampling variability of the standardizer itself,
/// so it runs slightly wide of noncentral-t constructions.
pub fn effect_size_dav(pre: &[f64], post: &[f64]) -> Result<EffectSize, StatsError> {
    if pre.len() != post.len() {
        return Err(StatsError::LengthMismatch(pre.len(), post.len()));
    }
    let n = pre.len();
    if n < 3 {
        return Err(StatsError::TooFewPairs { need: 3, got: n });
    }
    let sd_av = (sample_sd(pre) + sample_sd(post)) / 2.0;
    if sd_av == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let diffs: Vec<f64> = pre.iter().zip(post).map(|(a, b)| a - b).collect();
    let mean_diff = mean(&diffs);
    let se = sample_sd(&diffs) / (n as f64).sqrt();
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("valid t distribution")
        .inverse_cdf(0.975);
    Ok(EffectSize {
        d_av: mean_diff / sd_av,
        ci_lo: (mean_diff - t * se) / sd_av,
        ci_hi: (mean_diff + t * se) / sd_av,
    })
}

/// Why an association cell is undefined.
#[derive(Debug, Clone, PartialEq)]
pub enum CellIssue {
    /// Fewer than 3 pairwise-complete statements.
    InsufficientOverlap { shared: usize },
    /// One of the stance vectors is constant over the shared statements.
    ZeroVariance,
}

/// Symmetric matrix of inter-party correlations with a unit diagonal.
/// Cells can be undefined (insufficient overlap or zero variance); such
/// pairs are listed in `issues`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMatrix {
    registry: Arc<PartyRegistry>,
    values: Vec<Option<f64>>,
    issues: Vec<(PartyId, PartyId, CellIssue)>,
}

impl AssociationMatrix {
    pub fn registry(&self) -> &Arc<PartyRegistry> {
        &self.registry
    }

    pub fn get(&self, a: PartyId, b: PartyId) -> Option<f64> {
        self.values[a.index() * self.registry.len() + b.index()]
    }

    pub fn issues(&self) -> &[(PartyId, PartyId, CellIssue)] {
        &self.issues
    }

    /// Off-diagonal row of one party, in registry order (the diagonal cell
    /// is skipped).
    pub fn off_diagonal_row(&self, party: PartyId) -> Vec<Option<f64>> {
        self.registry
            .ids()
            .filter(|&other| other != party)
            .map(|other| self.get(party, other))
            .collect()
    }
}

/// Pearson correlation between party stance vectors over pairwise-complete
/// statements, for every party pair. Stances are coded -1/0/+1; a sentiment
/// matrix coded -1/+1 works identically (the correlation of two binary
/// codings is the phi coefficient).
pub fn party_association(matrix: &StanceMatrix) -> Result<AssociationMatrix, StatsError> {
    let registry = matrix.registry().clone();
    let n = registry.len();
    if n < 2 {
        return Err(StatsError::TooFewParties);
    }
    let mut values = vec![None; n * n];
    let mut issues = Vec::new();
    for a in registry.ids() {
        values[a.index() * n + a.index()] = Some(1.0);
        for b in registry.ids().filter(|b| b.index() > a.index()) {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for s in 0..matrix.n_statements() {
                if let (Some(x), Some(y)) = (
                    matrix.stance(s, a).numeric(),
                    matrix.stance(s, b).numeric(),
                ) {
                    xs.push(x);
                    ys.push(y);
                }
            }
            let cell = if xs.len() < 3 {
                issues.push((a, b, CellIssue::InsufficientOverlap { shared: xs.len() }));
                None
            } else {
                match pearson(&xs, &ys) {
                    Ok(r) => Some(r),
                    Err(StatsError::ZeroVariance) => {
                        issues.push((a, b, CellIssue::ZeroVariance));
                        None
                    }
                    Err(e) => return Err(e),
                }
            };
            values[a.index() * n + b.index()] = cell;
            values[b.index() * n + a.index()] = cell;
        }
    }
    Ok(AssociationMatrix {
        registry,
        values,
        issues,
    })
}

/// Per-party Pearson correlation between the party's off-diagonal
/// association rows in two matrices (e.g. one derived from survey stances,
/// one from parliamentary sentiment). Rows are compared over entries defined
/// in both; each party needs at least 3 such entries.
pub fn profile_similarity(
    a: &AssociationMatrix,
    b: &AssociationMatrix,
) -> Result<Vec<(PartyId, f64)>, StatsError> {
    let names_a: Vec<&str> = a.registry.names().collect();
    let names_b: Vec<&str> = b.registry.names().collect();
    if names_a != names_b {
        return Err(StatsError::PartyMismatch);
    }
    let mut out = Vec::with_capacity(a.registry.len());
    for party in a.registry.ids() {
        let row_a = a.off_diagonal_row(party);
        let row_b = b.off_diagonal_row(party);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (x, y) in row_a.iter().zip(&row_b) {
            if let (Some(x), Some(y)) = (x, y) {
                xs.push(*x);
                ys.push(*y);
            }
        }
        if xs.len() < 3 {
            return Err(StatsError::InsufficientOverlap {
                a: a.registry.name(party).to_string(),
                b: "(profile rows)".to_string(),
                need: 3,
            });
        }
        out.push((party, pearson(&xs, &ys)?));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::party::{Stance, StanceMatrix};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn pearson_and_spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        close(pearson(&x, &x).unwrap(), 1.0, 1e-12);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        close(pearson(&x, &neg).unwrap(), -1.0, 1e-12);
        close(spearman(&x, &x).unwrap(), 1.0, 1e-12);
        close(spearman(&x, &neg).unwrap(), -1.0, 1e-12);
    }

    /// Textbook-formula oracle for {(1,2),(2,1),(3,4),(4,3),(5,5)}:
    /// both r and rho come out at 0.8.
    #[test]
    fn hand_computed_five_pairs() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 1.0, 4.0, 3.0, 5.0];
        close(pearson(&x, &y).unwrap(), 0.8, 1e-12);
        close(spearman(&x, &y).unwrap(), 0.8, 1e-12);
    }

    #[test]
    fn spearman_averages_tied_ranks() {
        let ranks = average_ranks(&[10.0, 20.0, 20.0, 30.0]);
        assert_eq!(ranks, vec![1.0, 2.5, 2.5, 4.0]);
        // monotone with ties still correlates perfectly
        let x = [1.0, 2.0, 2.0, 4.0];
        let y = [2.0, 3.0, 3.0, 5.0];
        close(spearman(&x, &y).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn correlation_error_paths() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatsError::TooFewPairs { .. })
        ));
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::ZeroVariance)
        );
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(StatsError::LengthMismatch(3, 2))
        ));
    }

    #[test]
    fn z_transform_unit_case() {
        let z = z_transform(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(z, vec![-1.0, 0.0, 1.0]);
        assert_eq!(z_transform(&[2.0, 2.0, 2.0]), Err(StatsError::ZeroVariance));
        // idempotence
        let z2 = z_transform(&z).unwrap();
        for (a, b) in z.iter().zip(&z2) {
            close(*a, *b, 1e-9);
        }
    }

    #[test]
    fn ordinal_labels() {
        assert_eq!(ordinal_from_label("left").unwrap(), -2);
        assert_eq!(ordinal_from_label("Left-Center").unwrap(), -1);
        assert_eq!(ordinal_from_label("least biased").unwrap(), 0);
        assert_eq!(ordinal_from_label("LEAST_BIASED").unwrap(), 0);
        assert_eq!(ordinal_from_label("right-center").unwrap(), 1);
        assert_eq!(ordinal_from_label(" right ").unwrap(), 2);
        assert_eq!(
            ordinal_from_label("middle"),
            Err(StatsError::UnknownLabel("middle".into()))
        );
    }

    /// Oracle: closed-form eigendecomposition of [[1, r], [r, 1]] — the
    /// leading eigenvector is (1,1)/sqrt(2) with eigenvalue 1+r, so the
    /// unit-variance scores are (z(x)+z(y))/sqrt(2(1+r)).
    #[test]
    fn pc1_matches_eigen_oracle() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [1.2, 1.9, 3.4, 3.6, 5.1];
        let scores = pc1_two_scales(&x, &y).unwrap();
        let zx = z_transform(&x).unwrap();
        let zy = z_transform(&y).unwrap();
        let r = pearson(&x, &y).unwrap();
        // brute-force 2x2 eigenvector via the quadratic characteristic rule
        let lambda = 1.0 + r;
        let ev = (1.0 / 2.0f64.sqrt(), 1.0 / 2.0f64.sqrt());
        for i in 0..x.len() {
            let projected = (zx[i] * ev.0 + zy[i] * ev.1) / lambda.sqrt();
            close(scores[i], projected, 1e-12);
        }
        // unit sample variance and positive correlation with x
        close(sample_sd(&scores), 1.0, 1e-12);
        assert!(pearson(&x, &scores).unwrap() > 0.99);
    }

    #[test]
    fn pc1_degenerate_cases() {
        let x = [1.0, 2.0, 3.0, 4.0];
        // y = x: scores equal z(x)
        let scores = pc1_two_scales(&x, &x).unwrap();
        let zx = z_transform(&x).unwrap();
        for (s, z) in scores.iter().zip(&zx) {
            close(*s, *z, 1e-12);
        }
        // y = -x: the shared direction vanishes; convention along x
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let scores = pc1_two_scales(&x, &neg).unwrap();
        for (s, z) in scores.iter().zip(&zx) {
            close(*s, *z, 1e-12);
        }
    }

    #[test]
    fn effect_size_closed_forms() {
        // pre = post -> 0 with a degenerate CI at 0
        let v = [0.1, 0.2, 0.3, 0.4];
        let e = effect_size_dav(&v, &v).unwrap();
        assert_eq!(e.d_av, 0.0);
        assert_eq!((e.ci_lo, e.ci_hi), (0.0, 0.0));
        // constant shift c with equal SDs s: d_av = c / s
        let pre = [1.0, 2.0, 3.0, 4.0];
        let post = [0.5, 1.5, 2.5, 3.5];
        let e = effect_size_dav(&pre, &post).unwrap();
        close(e.d_av, 0.5 / sample_sd(&pre), 1e-12);
        // constant inputs -> zero variance
        assert_eq!(
            effect_size_dav(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]),
            Err(StatsError::ZeroVariance)
        );
    }

    fn toy_matrix() -> StanceMatrix {
        use Stance::*;
        let reg = Arc::new(PartyRegistry::new(["X", "Y", "Z"]).unwrap());
        let x = reg.id("X").unwrap();
        let y = reg.id("Y").unwrap();
        let z = reg.id("Z").unwrap();
        let mut b = StanceMatrix::builder(reg);
        let xs = [Approval, Neutral, Rejection, Approval, Neutral];
        let ys = [Approval, Rejection, Rejection, Neutral, Approval];
        let zs = [Rejection, Approval, Approval, Rejection, Neutral];
        for i in 0..5 {
            let id = format!("s{i}");
            b.set(&id, None, x, xs[i]).unwrap();
            b.set(&id, None, y, ys[i]).unwrap();
            b.set(&id, None, z, zs[i]).unwrap();
        }
        b.build().unwrap()
    }

    /// 5-statement toy matrix; X/Y oracle by hand: r = 2/sqrt(2.8*4) = 0.5976.
    #[test]
    fn association_matches_hand_pearson() {
        let m = toy_matrix();
        let assoc = party_association(&m).unwrap();
        let reg = assoc.registry().clone();
        let (x, y, z) = (
            reg.id("X").unwrap(),
            reg.id("Y").unwrap(),
            reg.id("Z").unwrap(),
        );
        close(assoc.get(x, y).unwrap(), 0.5976143046671968, 1e-12);
        assert_eq!(assoc.get(x, x), Some(1.0));
        // symmetry
        assert_eq!(assoc.get(x, y), assoc.get(y, x));
        close(assoc.get(x, z).unwrap(), -0.8964214570007952, 1e-12);
        close(assoc.get(y, z).unwrap(), -0.75, 1e-12);
    }

    #[test]
    fn association_insufficient_overlap_reported() {
        use Stance::*;
        let reg = Arc::new(PartyRegistry::new(["X", "Y"]).unwrap());
        let x = reg.id("X").unwrap();
        let y = reg.id("Y").unwrap();
        let mut b = StanceMatrix::builder(reg);
        b.set("s0", None, x, Approval).unwrap();
        b.set("s0", None, y, Rejection).unwrap();
        b.set("s1", None, x, Approval).unwrap();
        b.set("s2", None, y, Approval).unwrap();
        let m = b.build().unwrap();
        let assoc = party_association(&m).unwrap();
        assert_eq!(assoc.get(x, y), None);
        assert!(matches!(
            assoc.issues()[0].2,
            CellIssue::InsufficientOverlap { shared: 1 }
        ));
    }

    #[test]
    fn opposite_stances_give_minus_one() {
        use Stance::*;
        let reg = Arc::new(PartyRegistry::new(["X", "Y"]).unwrap());
        let x = reg.id("X").unwrap();
        let y = reg.id("Y").unwrap();
        let mut b = StanceMatrix::builder(reg);
        let xs = [Approval, Rejection, Approval, Rejection];
        for (i, sx) in xs.iter().enumerate() {
            let id = format!("s{i}");
            b.set(&id, None, x, *sx).unwrap();
            let sy = if *sx == Approval { Rejection } else { Approval };
            b.set(&id, None, y, sy).unwrap();
        }
        let m = b.build().unwrap();
        let assoc = party_association(&m).unwrap();
        close(assoc.get(x, y).unwrap(), -1.0, 1e-12);
    }

    #[test]
    fn profile_similarity_identity_and_negation() {
        let m = toy_matrix();
        // identity requires >= 3 defined off-diagonal entries per row, so a
        // 3-party matrix (2 per row) must error
        let assoc = party_association(&m).unwrap();
        assert!(matches!(
            profile_similarity(&assoc, &assoc),
            Err(StatsError::InsufficientOverlap { .. })
        ));

        // 4-party synthetic matrices with hand-set cells
        let reg = Arc::new(PartyRegistry::new(["A", "B", "C", "D"]).unwrap());
        let n = reg.len();
        let mut values = vec![None; n * n];
        let cells = [
            (0, 1, 0.8),
            (0, 2, -0.2),
            (0, 3, 0.4),
            (1, 2, 0.1),
            (1, 3, -0.5),
            (2, 3, 0.3),
        ];
        for (i, j, v) in cells {
            values[i * n + j] = Some(v);
            values[j * n + i] = Some(v);
        }
        for i in 0..n {
            values[i * n + i] = Some(1.0);
        }
        let a = AssociationMatrix {
            registry: reg.clone(),
            values: values.clone(),
            issues: vec![],
        };
        let sims = profile_similarity(&a, &a).unwrap();
        for (_, r) in &sims {
            close(*r, 1.0, 1e-12);
        }
        let negated = AssociationMatrix {
            registry: reg,
            values: values
                .iter()
                .map(|v| v.map(|x| if x == 1.0 { 1.0 } else { -x }))
                .collect(),
            issues: vec![],
        };
        // off-diagonal rows negated -> perfect anticorrelation per party
        let sims = profile_similarity(&a, &negated).unwrap();
        for (_, r) in &sims {
            close(*r, -1.0, 1e-12);
        }
    }

    #[test]
    fn profile_similarity_party_mismatch() {
        let m = toy_matrix();
        let assoc = party_association(&m).unwrap();
        let other_reg = Arc::new(PartyRegistry::new(["P", "Q", "R"]).unwrap());
        let other = AssociationMatrix {
            registry: other_reg,
            values: vec![None; 9],
            issues: vec![],
        };
        assert_eq!(
            profile_similarity(&assoc, &other),
            Err(StatsError::PartyMismatch)
        );
    }
}

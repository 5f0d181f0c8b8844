//! Bayes factors between finished evidence runs and their Jeffreys-scale
//! classification.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEvidence {
    pub name: String,
    pub log_evidence: f64,
    pub log_evidence_error: f64,
    pub n_parameters: usize,
}

/// Jeffreys bands over `ln(Z_p / Z_q)`, each closed on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum JeffreysLabel {
    /// `[0, 1.2)`
    Weak,
    /// `[1.2, 2.3)`
    Substantial,
    /// `[2.3, 4.6)`
    Strong,
    /// `[4.6, 7]`
    Decisive,
    /// `> 7`
    BeyondReasonableDoubt,
}

impl JeffreysLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Weak => "Weak",
            Self::Substantial => "Substantial",
            Self::Strong => "Strong",
            Self::Decisive => "Decisive",
            Self::BeyondReasonableDoubt => "Beyond reasonable doubt",
        }
    }
}

impl fmt::Display for JeffreysLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which side of a comparison the evidence favours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Evidence against the denominator (factor ≥ 0).
    FavoursNumerator,
    /// Evidence against the numerator (factor < 0, classified by magnitude).
    FavoursDenominator,
}

/// `ln(Z_a / Z_b)`.
pub fn bayes_factor(a: &ModelEvidence, b: &ModelEvidence) -> f64 {
    a.log_evidence - b.log_evidence
}

/// Classify a log_e Bayes factor; negative inputs are classified by magnitude.
pub fn jeffreys_classify(log_e_factor: f64) -> Result<(JeffreysLabel, Direction)> {
    if !log_e_factor.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Bayes factor must be finite, got {log_e_factor}"
        )));
    }
    let direction = if log_e_factor < 0.0 {
        Direction::FavoursDenominator
    } else {
        Direction::FavoursNumerator
    };
    let x = log_e_factor.abs();
    let label = if x > 7.0 {
        JeffreysLabel::BeyondReasonableDoubt
    } else if x >= 4.6 {
        JeffreysLabel::Decisive
    } else if x >= 2.3 {
        JeffreysLabel::Strong
    } else if x >= 1.2 {
        JeffreysLabel::Substantial
    } else {
        JeffreysLabel::Weak
    };
    Ok((label, direction))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub numerator: String,
    pub denominator: String,
    pub log_e_factor: f64,
    /// `√(err_a² + err_b²)`, reported only.
    pub log_e_factor_error: f64,
    pub label: JeffreysLabel,
    pub direction: Direction,
}

impl PairComparison {
    pub fn factor(&self) -> f64 {
        self.log_e_factor.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ranked: Vec<ModelEvidence>,
    pub pairs: Vec<PairComparison>,
}

fn rank_order(a: &ModelEvidence, b: &ModelEvidence) -> Ordering {
    b.log_evidence
        .total_cmp(&a.log_evidence)
        .then(a.n_parameters.cmp(&b.n_parameters))
        .then_with(|| a.name.cmp(&b.name))
}

pub fn build_report(evidences: &[ModelEvidence], pairs: &[(String, String)]) -> Result<ComparisonReport> {
    let mut by_name: HashMap<&str, &ModelEvidence> = HashMap::new();
    for e in evidences {
        if e.log_evidence.is_nan() || e.log_evidence_error.is_nan() || e.log_evidence_error < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "model {}: log evidence must be a number and its error nonnegative",
                e.name
            )));
        }
        if by_name.insert(e.name.as_str(), e).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate model name {}", e.name)));
        }
    }
    let lookup = |name: &str| {
        by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model {name} in comparison")))
    };

    let mut out_pairs = Vec::with_capacity(pairs.len());
    for (p, q) in pairs {
        let (a, b) = (lookup(p)?, lookup(q)?);
        let log_e_factor = bayes_factor(a, b);
        let (label, direction) = jeffreys_classify(log_e_factor)?;
        out_pairs.push(PairComparison {
            numerator: p.clone(),
            denominator: q.clone(),
            log_e_factor,
            log_e_factor_error: a.log_evidence_error.hypot(b.log_evidence_error),
            label,
            direction,
        });
    }

    let mut ranked = evidences.to_vec();
    ranked.sort_by(rank_order);
    Ok(ComparisonReport {
        ranked,
        pairs: out_pairs,
    })
}

pub const RANKING_HEADER: &str = "rank,model,log_evidence,log_evidence_error,n_parameters";
pub const BAYES_FACTOR_HEADER: &str = "pair,log_e_factor,factor,label";

impl ComparisonReport {
    pub fn ranking_csv(&self) -> String {
        let mut s = format!("{RANKING_HEADER}\n");
        for (i, e) in self.ranked.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{:.6},{:.6},{}",
                i + 1,
                e.name,
                e.log_evidence,
                e.log_evidence_error,
                e.n_parameters
            );
        }
        s
    }

    pub fn bayes_factors_csv(&self) -> String {
        let mut s = format!("{BAYES_FACTOR_HEADER}\n");
        for p in &self.pairs {
            let _ = writeln!(
                s,
                "{}/{},{:.6},{:.6e},{}",
                p.numerator,
                p.denominator,
                p.log_e_factor,
                p.factor(),
                p.label
            );
        }
        s
    }

    /// Aligned plain-text tables: ranking, then pairwise factors.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<6} {:<10} {:>14} {:>10} {:>6}",
            "rank", "model", "log(Z)", "+/-", "params"
        );
        for (i, e) in self.ranked.iter().enumerate() {
            let _ = writeln!(
                s,
                "{:<6} {:<10} {:>14.4} {:>10.4} {:>6}",
                i + 1,
                e.name,
                e.log_evidence,
                e.log_evidence_error,
                e.n_parameters
            );
        }
        if !self.pairs.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(
                s,
                "{:<12} {:>14} {:>12} {:>10}  evidence",
                "Hp/Hq", "Zp/Zq", "ln(Zp/Zq)", "+/-"
            );
            for p in &self.pairs {
                let against = match p.direction {
                    Direction::FavoursNumerator => &p.denominator,
                    Direction::FavoursDenominator => &p.numerator,
                };
                let _ = writeln!(
                    s,
                    "{:<12} {:>14.4e} {:>12.3} {:>10.3}  {} (against {})",
                    format!("{}/{}", p.numerator, p.denominator),
                    p.factor(),
                    p.log_e_factor,
                    p.log_e_factor_error,
                    p.label,
                    against
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(name: &str, log_evidence: f64, n: usize) -> ModelEvidence {
        ModelEvidence {
            name: name.into(),
            log_evidence,
            log_evidence_error: 0.1,
            n_parameters: n,
        }
    }

    fn hbeam_reference() -> Vec<ModelEvidence> {
        vec![
            ev("1A", -2.188, 5),
            ev("1B", -11.40, 7),
            ev("1C", -12.15, 12),
            ev("2A", -14.95, 7),
            ev("2B", -2.188, 5),
            ev("2C", -21.74, 12),
        ]
    }

    #[test]
    fn reference_factors() {
        let t = hbeam_reference();
        let f = bayes_factor(&t[0], &t[1]);
        assert!((f - 9.212).abs() < 1e-12);
        assert_eq!((f * 10.0).round() / 10.0, 9.2);
        assert_eq!(jeffreys_classify(f).unwrap().0, JeffreysLabel::BeyondReasonableDoubt);
        assert_eq!(bayes_factor(&t[0], &t[4]), 0.0);
        assert_eq!(bayes_factor(&t[0], &t[0]), 0.0);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(jeffreys_classify(9.2).unwrap().0, JeffreysLabel::BeyondReasonableDoubt);
        assert_eq!(jeffreys_classify(3.5).unwrap().0, JeffreysLabel::Strong);
        assert_eq!(jeffreys_classify(0.0).unwrap().0, JeffreysLabel::Weak);
        assert_eq!(
            jeffreys_classify(-3.5).unwrap(),
            (JeffreysLabel::Strong, Direction::FavoursDenominator)
        );
        assert!(jeffreys_classify(f64::NAN).is_err());
        assert!(jeffreys_classify(f64::INFINITY).is_err());
    }

    #[test]
    fn band_edges_go_up() {
        assert_eq!(jeffreys_classify(1.2).unwrap().0, JeffreysLabel::Substantial);
        assert_eq!(jeffreys_classify(2.3).unwrap().0, JeffreysLabel::Strong);
        assert_eq!(jeffreys_classify(4.6).unwrap().0, JeffreysLabel::Decisive);
        assert_eq!(jeffreys_classify(7.0).unwrap().0, JeffreysLabel::Decisive);
        assert_eq!(
            jeffreys_classify(7.0 + 1e-12).unwrap().0,
            JeffreysLabel::BeyondReasonableDoubt
        );
    }

    #[test]
    fn hbeam_reference_ranking() {
        let r = build_report(&hbeam_reference(), &[]).unwrap();
        let names: Vec<&str> = r.ranked.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, ["1A", "2B", "1B", "1C", "2A", "2C"]);
    }

    #[test]
    fn single_model_and_ties() {
        let r = build_report(&[ev("only", -1.0, 3)], &[]).unwrap();
        assert_eq!(r.ranked.len(), 1);
        assert!(r.pairs.is_empty());

        let r = build_report(&[ev("c", 0.0, 9), ev("a", 0.0, 4), ev("b", 0.0, 1)], &[]).unwrap();
        let counts: Vec<usize> = r.ranked.iter().map(|e| e.n_parameters).collect();
        assert_eq!(counts, [1, 4, 9]);
    }

    #[test]
    fn unknown_or_duplicate_names() {
        let pairs = [("1A".to_string(), "3Z".to_string())];
        assert!(build_report(&hbeam_reference(), &pairs).is_err());
        let mut dup = hbeam_reference();
        dup.push(ev("1A", 0.0, 1));
        assert!(build_report(&dup, &[]).is_err());
    }

    #[test]
    fn hbeam_reference_pairs() {
        let pairs: Vec<(String, String)> = [("1A", "1B"), ("1A", "2A"), ("1A", "2B"), ("1B", "2A")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let r = build_report(&hbeam_reference(), &pairs).unwrap();
        let labels: Vec<JeffreysLabel> = r.pairs.iter().map(|p| p.label).collect();
        assert_eq!(
            labels,
            [
                JeffreysLabel::BeyondReasonableDoubt,
                JeffreysLabel::BeyondReasonableDoubt,
                JeffreysLabel::Weak,
                JeffreysLabel::Strong
            ]
        );
        assert!(r
            .bayes_factors_csv()
            .starts_with("pair,log_e_factor,factor,label\n1A/1B,9.212000,"));
        assert!(r.to_text().contains("Beyond reasonable doubt (against 1B)"));
    }

    proptest! {
        #[test]
        fn antisymmetric(a in -1e3..1e3f64, b in -1e3..1e3f64) {
            let (x, y) = (ev("x", a, 1), ev("y", b, 1));
            prop_assert_eq!(bayes_factor(&x, &y), -bayes_factor(&y, &x));
        }

        #[test]
        fn classification_monotone(a in 0.0..20.0f64, b in 0.0..20.0f64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(jeffreys_classify(lo).unwrap().0 <= jeffreys_classify(hi).unwrap().0);
        }

        #[test]
        fn ranking_consistent_with_factors(zs in proptest::collection::vec(-50.0..0.0f64, 1..8)) {
            let evs: Vec<ModelEvidence> = zs.iter().enumerate().map(|(i, &z)| ev(&format!("m{i}"), z, i % 3)).collect();
            let r = build_report(&evs, &[]).unwrap();
            for w in r.ranked.windows(2) {
                prop_assert!(bayes_factor(&w[0], &w[1]) >= 0.0);
            }
        }
    }
}

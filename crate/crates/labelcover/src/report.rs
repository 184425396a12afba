//! Experiment reports: one record per tracked statistic, emitted as
//! line-delimited JSON and as a CSV summary with the fixed column set
//! `experiment, trials, statistic, mean, variance, threshold, frequency,
//! oracle_value, pass`.

use serde::Serialize;

use crate::stats::mean_variance;

/// How a record's pass flag is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatKind {
    /// |mean − oracle| ≤ 3·sqrt(sample variance / trials).
    MeanVsOracle,
    /// One-sided: frequency + 3·sqrt(f(1−f)/trials) ≥ claim probability.
    FrequencyVsClaim,
    /// Strict frequency floor: frequency ≥ claim probability.
    FrequencyFloor,
    /// Two-sided: |frequency − oracle| ≤ 3·sqrt(oracle(1−oracle)/trials).
    FrequencyVsOracle,
    /// Every trial must satisfy the condition.
    Invariant,
    /// Deterministic comparison: oracle_value ≤ threshold.
    BoundHolds,
    /// Tracked only; no pass criterion.
    Informational,
}

/// One tracked statistic. `pass = None` means the record is informational
/// or the experiment refused to assert the claim at the given constants.
#[derive(Clone, Debug, Serialize)]
pub struct StatRecord {
    pub statistic: String,
    pub kind: StatKind,
    /// Number of trials this statistic was computed over (may be smaller
    /// than the experiment's trial count when trials are discarded).
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub threshold: Option<f64>,
    pub success_count: Option<u64>,
    pub claim_probability: Option<f64>,
    pub oracle_value: Option<f64>,
    /// The 3-sigma radius used in the pass decision, when one applies.
    pub radius: Option<f64>,
    pub pass: Option<bool>,
}

impl StatRecord {
    pub fn frequency(&self) -> Option<f64> {
        self.success_count.map(|s| s as f64 / self.samples.max(1) as f64)
    }

    pub fn mean_vs_oracle(name: &str, samples: &[f64], oracle: f64) -> StatRecord {
        let (mean, variance) = mean_variance(samples);
        let radius = 3.0 * (variance / samples.len().max(1) as f64).sqrt();
        StatRecord {
            statistic: name.to_string(),
            kind: StatKind::MeanVsOracle,
            samples: samples.len() as u64,
            mean,
            variance,
            threshold: None,
            success_count: None,
            claim_probability: None,
            oracle_value: Some(oracle),
            radius: Some(radius),
            pass: Some((mean - oracle).abs() <= radius),
        }
    }

    /// `claimed = false` reports the frequency without asserting the claim
    /// (the run's constants do not support the probabilistic argument).
    pub fn frequency_vs_claim(
        name: &str,
        values: &[f64],
        successes: u64,
        trials: u64,
        threshold: f64,
        claim: f64,
        claimed: bool,
    ) -> StatRecord {
        let (mean, variance) = mean_variance(values);
        let f = successes as f64 / trials.max(1) as f64;
        let radius = 3.0 * (f * (1.0 - f) / trials.max(1) as f64).sqrt();
        StatRecord {
            statistic: name.to_string(),
            kind: StatKind::FrequencyVsClaim,
            samples: trials,
            mean,
            variance,
            threshold: Some(threshold),
            success_count: Some(successes),
            claim_probability: Some(claim),
            oracle_value: None,
            radius: Some(radius),
            pass: claimed.then_some(f + radius >= claim),
        }
    }

    pub fn frequency_floor(
        name: &str,
        successes: u64,
        trials: u64,
        claim: f64,
    ) -> StatRecord {
        let f = successes as f64 / trials.max(1) as f64;
        StatRecord {
            statistic: name.to_string(),
            kind: StatKind::FrequencyFloor,
            samples: trials,
            mean: f,
            variance: f * (1.0 - f),
            threshold: None,
            success_count: Some(successes),
            claim_probability: Some(claim),
            oracle_value: None,
            radius: None,
            pass: Some(f >= claim),
        }
    }

    pub fn frequency_vs_oracle(
        name: &str,
        successes: u64,
        trials: u64,
        threshold: f64,
        oracle_probability: f64,
    ) -> StatRecord {
        let f = successes as f64 / trials.max(1) as f64;
        let radius =
            3.0 * (oracle_probability * (1.0 - oracle_probability) / trials.max(1) as f64).sqrt();
        StatRecord {
            statistic: name.to_string(),
            kind: StatKind::FrequencyVsOracle,
            samples: trials,
            mean: f,
            variance: f * (1.0 - f),
            threshold: Some(threshold),
            success_count: Some(successes),
            claim_probability: None,
            oracle_value: Some(oracle_probability),
            radius: Some(radius),
            pass: Some((f - oracle_probability).abs() <= radius),
        }
    }

    pub fn invariant(name: &str, successes: u64, trials: u64, threshold: Option<f64>) -> StatRecord {
        StatRecord {
            statistic: name.to_string(),
            kind: StatKind::Invariant,
            samples: trials,
            mean: successes as f64 / trials.max(1) as f64,
            variance: 0.0,
            threshold,
            success_count: Some(successes),
            claim_probability: Some(1.0),
            oracle_value: None,
            radius: None,
            pass: Some(successes == trials),
        }
    }

    pub fn bound_holds(name: &str, value: f64, bound: f64) -> StatRecord {
        StatRecord {
            statistic: name.to_string(),
            kind: StatKind::BoundHolds,
            samples: 0,
            mean: value,
            variance: 0.0,
            threshold: Some(bound),
            success_count: None,
            claim_probability: None,
            oracle_value: Some(value),
            radius: None,
            pass: Some(value <= bound),
        }
    }

    pub fn informational(name: &str, samples: &[f64]) -> StatRecord {
        let (mean, variance) = mean_variance(samples);
        StatRecord {
            statistic: name.to_string(),
            kind: StatKind::Informational,
            samples: samples.len() as u64,
            mean,
            variance,
            threshold: None,
            success_count: None,
            claim_probability: None,
            oracle_value: None,
            radius: None,
            pass: None,
        }
    }
}

/// A full experiment report, reproducible bit-for-bit from its inputs.
#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub experiment: String,
    pub trials: u64,
    /// Trials dropped because a solver budget was exhausted.
    pub discarded: u64,
    /// Whether the run's constants support asserting the reference
    /// probability claims.
    pub guard_ok: bool,
    pub records: Vec<StatRecord>,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}

impl TrialReport {
    pub fn record(&self, name: &str) -> Option<&StatRecord> {
        self.records.iter().find(|r| r.statistic == name)
    }

    /// True when no asserted record failed.
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass != Some(false))
    }

    /// CSV summary, one row per statistic.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "experiment,trials,statistic,mean,variance,threshold,frequency,oracle_value,pass\n",
        );
        for r in &self.records {
            let pass = match r.pass {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "na",
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.experiment,
                r.samples,
                r.statistic,
                r.mean,
                r.variance,
                fmt_opt(r.threshold),
                fmt_opt(r.frequency()),
                fmt_opt(r.oracle_value),
                pass
            ));
        }
        out
    }

    /// Line-delimited JSON: one header object, then one object per record.
    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Header<'a> {
            experiment: &'a str,
            trials: u64,
            discarded: u64,
            guard_ok: bool,
        }
        let mut out = serde_json::to_string(&Header {
            experiment: &self.experiment,
            trials: self.trials,
            discarded: self.discarded,
            guard_ok: self.guard_ok,
        })
        .expect("serializable");
        out.push('\n');
        for r in &self.records {
            #[derive(Serialize)]
            struct Line<'a> {
                experiment: &'a str,
                #[serde(flatten)]
                record: &'a StatRecord,
            }
            out.push_str(
                &serde_json::to_string(&Line { experiment: &self.experiment, record: r })
                    .expect("serializable"),
            );
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_record_passes_on_exact_match() {
        let r = StatRecord::mean_vs_oracle("x", &[2.0, 2.0, 2.0], 2.0);
        assert_eq!(r.pass, Some(true));
        assert_eq!(r.variance, 0.0);
    }

    #[test]
    fn claim_record_one_sided() {
        // 985/1000 with claim 0.99: radius ~0.0115, passes one-sided
        let vals = vec![0.0; 1000];
        let r = StatRecord::frequency_vs_claim("x", &vals, 985, 1000, 1.0, 0.99, true);
        assert_eq!(r.pass, Some(true));
        // refused claim reports but does not assert
        let r = StatRecord::frequency_vs_claim("x", &vals, 10, 1000, 1.0, 0.99, false);
        assert_eq!(r.pass, None);
    }

    #[test]
    fn csv_has_fixed_columns() {
        let report = TrialReport {
            experiment: "demo".into(),
            trials: 10,
            discarded: 0,
            guard_ok: true,
            records: vec![StatRecord::invariant("ok", 10, 10, None)],
        };
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,trials,statistic,mean,variance,threshold,frequency,oracle_value,pass"
        );
        assert_eq!(lines.next().unwrap(), "demo,10,ok,1,0,,1,,pass");
    }

    #[test]
    fn jsonl_roundtrips_through_serde() {
        let report = TrialReport {
            experiment: "demo".into(),
            trials: 3,
            discarded: 1,
            guard_ok: false,
            records: vec![StatRecord::bound_holds("b", 0.5, 1.0)],
        };
        let jsonl = report.to_jsonl();
        for line in jsonl.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("experiment").is_some());
        }
    }
}

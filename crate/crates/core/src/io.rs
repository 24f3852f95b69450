//! JSON file formats.
//!
//! * Behavior: `{"settings_a", "settings_b", "outcomes_a", "outcomes_b", "p"}`
//!   with `p[alpha][beta][a][b]`; outcome `"0"` is no detection.
//! * Estimate: a behavior file plus `"stderr"` in the same nested layout.
//! * Tally: the behavior header with integer `"n"` and `"totals"`.
//! * Local model: `{"strategies": [{"fa", "fb"}], "weights"}`.
//! * Threshold: `{"eta_star", "mode", "trace"}`.
//! * Run log: JSON Lines of [`RunRecord`].
//!
//! Every parser rejects unknown fields.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::behavior::{flatten_nested, Behavior};
use crate::detection::{ConstraintMode, ThresholdResult};
use crate::error::{Error, Result};
use crate::polytope::{LocalModel, LocalStrategy};
use crate::runs::{RunRecord, Tally};
use crate::scenario::{Alphabet, Scenario};

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BehaviorFile {
    settings_a: usize,
    settings_b: usize,
    outcomes_a: Vec<String>,
    outcomes_b: Vec<String>,
    p: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EstimateFile {
    settings_a: usize,
    settings_b: usize,
    outcomes_a: Vec<String>,
    outcomes_b: Vec<String>,
    p: Vec<Vec<Vec<Vec<f64>>>>,
    stderr: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TallyFile {
    settings_a: usize,
    settings_b: usize,
    outcomes_a: Vec<String>,
    outcomes_b: Vec<String>,
    n: Vec<Vec<Vec<Vec<u64>>>>,
    totals: Vec<Vec<u64>>,
}

fn scenario_from_header(sa: usize, sb: usize, oa: &[String], ob: &[String]) -> Result<Scenario> {
    Scenario::new(sa, sb, Alphabet::from_symbols(oa)?, Alphabet::from_symbols(ob)?)
}

fn nest<T: Copy>(s: &Scenario, flat: &[T]) -> Vec<Vec<Vec<Vec<T>>>> {
    (0..s.settings_a())
        .map(|alpha| {
            (0..s.settings_b())
                .map(|beta| {
                    (0..s.outcomes_a().size())
                        .map(|a| (0..s.outcomes_b().size()).map(|b| flat[s.index(alpha, beta, a, b)]).collect())
                        .collect()
                })
                .collect()
        })
        .collect()
}

pub fn behavior_to_json(b: &Behavior) -> serde_json::Value {
    let s = b.scenario();
    serde_json::to_value(BehaviorFile {
        settings_a: s.settings_a(),
        settings_b: s.settings_b(),
        outcomes_a: s.outcomes_a().symbols(),
        outcomes_b: s.outcomes_b().symbols(),
        p: b.to_nested(),
    })
    .expect("behavior serializes")
}

pub fn behavior_from_json(text: &str) -> Result<Behavior> {
    let f: BehaviorFile = serde_json::from_str(text).map_err(parse_err)?;
    let s = scenario_from_header(f.settings_a, f.settings_b, &f.outcomes_a, &f.outcomes_b)?;
    Behavior::from_nested(s, &f.p)
}

pub fn estimate_to_json(b: &Behavior, stderr: &[f64]) -> serde_json::Value {
    let s = b.scenario();
    serde_json::to_value(EstimateFile {
        settings_a: s.settings_a(),
        settings_b: s.settings_b(),
        outcomes_a: s.outcomes_a().symbols(),
        outcomes_b: s.outcomes_b().symbols(),
        p: b.to_nested(),
        stderr: nest(s, stderr),
    })
    .expect("estimate serializes")
}

pub fn estimate_from_json(text: &str) -> Result<(Behavior, Vec<f64>)> {
    let f: EstimateFile = serde_json::from_str(text).map_err(parse_err)?;
    let s = scenario_from_header(f.settings_a, f.settings_b, &f.outcomes_a, &f.outcomes_b)?;
    let stderr = flatten_nested(&s, &f.stderr)?;
    Ok((Behavior::from_nested(s, &f.p)?, stderr))
}

/// Reads either a behavior file or an estimate file (whose `stderr` is
/// dropped).
pub fn behavior_or_estimate_from_json(text: &str) -> Result<Behavior> {
    match behavior_from_json(text) {
        Ok(b) => Ok(b),
        Err(first) => estimate_from_json(text).map(|(b, _)| b).map_err(|_| first),
    }
}

pub fn tally_to_json(t: &Tally) -> serde_json::Value {
    let s = t.scenario();
    serde_json::to_value(TallyFile {
        settings_a: s.settings_a(),
        settings_b: s.settings_b(),
        outcomes_a: s.outcomes_a().symbols(),
        outcomes_b: s.outcomes_b().symbols(),
        n: nest(s, t.counts()),
        totals: t.totals().chunks(s.settings_b()).map(<[u64]>::to_vec).collect(),
    })
    .expect("tally serializes")
}

pub fn tally_from_json(text: &str) -> Result<Tally> {
    let f: TallyFile = serde_json::from_str(text).map_err(parse_err)?;
    let s = scenario_from_header(f.settings_a, f.settings_b, &f.outcomes_a, &f.outcomes_b)?;
    let t = Tally::from_counts(s, flatten_nested(&s, &f.n)?)?;
    let totals: Vec<u64> = f.totals.concat();
    if totals != t.totals() {
        return Err(Error::Parse("totals do not match block sums".into()));
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    strategies: Vec<LocalStrategy>,
    weights: Vec<f64>,
}

pub fn model_to_json(m: &LocalModel) -> serde_json::Value {
    serde_json::to_value(ModelFile {
        strategies: m.strategies().to_vec(),
        weights: m.weights().to_vec(),
    })
    .expect("model serializes")
}

pub fn model_from_json(text: &str) -> Result<LocalModel> {
    let f: ModelFile = serde_json::from_str(text).map_err(parse_err)?;
    LocalModel::new(f.strategies, f.weights)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdFile {
    eta_star: f64,
    mode: ConstraintMode,
    trace: Vec<(f64, bool)>,
}

pub fn threshold_to_json(r: &ThresholdResult) -> serde_json::Value {
    serde_json::to_value(ThresholdFile {
        eta_star: r.eta_star,
        mode: r.mode,
        trace: r.bisection_trace.clone(),
    })
    .expect("threshold serializes")
}

/// `(eta_star, mode, trace)`; the model lives in its own file.
pub fn threshold_from_json(text: &str) -> Result<(f64, ConstraintMode, Vec<(f64, bool)>)> {
    let f: ThresholdFile = serde_json::from_str(text).map_err(parse_err)?;
    Ok((f.eta_star, f.mode, f.trace))
}

pub fn write_run_log<W: Write, I: IntoIterator<Item = RunRecord>>(mut out: W, records: I) -> Result<u64> {
    let mut n = 0;
    for r in records {
        serde_json::to_writer(&mut out, &r).map_err(parse_err)?;
        out.write_all(b"\n").map_err(|e| Error::Parse(e.to_string()))?;
        n += 1;
    }
    out.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(n)
}

/// Reads a run log; blank lines are skipped.
pub fn read_run_log<R: BufRead>(input: R) -> Result<Vec<RunRecord>> {
    let mut out = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: RunRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        if !(r.t_choice_a < 0.0 && r.t_choice_b < 0.0) {
            return Err(Error::Parse(format!("line {}: choice times must be negative", lineno + 1)));
        }
        out.push(r);
    }
    Ok(out)
}

/// Smallest scenario covering every record.
pub fn infer_scenario(records: &[RunRecord]) -> Result<Scenario> {
    use crate::scenario::Outcome;
    if records.is_empty() {
        return Err(Error::InvalidArgument("empty run log".into()));
    }
    let sa = records.iter().map(|r| r.alpha).max().unwrap() + 1;
    let sb = records.iter().map(|r| r.beta).max().unwrap() + 1;
    let alpha_of = |has_null: bool| {
        if has_null {
            Alphabet::PlusMinusNull
        } else {
            Alphabet::PlusMinus
        }
    };
    Scenario::new(
        sa,
        sb,
        alpha_of(records.iter().any(|r| r.a == Outcome::Null)),
        alpha_of(records.iter().any(|r| r.b == Outcome::Null)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Outcome::*;

    #[test]
    fn behavior_file_round_trip() {
        let s = Scenario::new(2, 1, Alphabet::PlusMinusNull, Alphabet::PlusMinus).unwrap();
        let b = Behavior::new(s, vec![0.1, 0.2, 0.3, 0.05, 0.15, 0.2, 0.5, 0.0, 0.0, 0.5, 0.0, 0.0]).unwrap();
        let text = behavior_to_json(&b).to_string();
        assert!(text.contains(r#""outcomes_a":["+","-","0"]"#));
        assert_eq!(behavior_from_json(&text).unwrap(), b);
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"settings_a":1,"settings_b":1,"outcomes_a":["+","-"],"outcomes_b":["+","-"],
                       "p":[[[[0.25,0.25],[0.25,0.25]]]],"extra":1}"#;
        assert!(matches!(behavior_from_json(text), Err(Error::Parse(_))));
        let model = r#"{"strategies":[{"fa":["+"],"fb":["-"],"fc":[]}],"weights":[1.0]}"#;
        assert!(model_from_json(model).is_err());
    }

    #[test]
    fn invalid_content_rejected() {
        let bad_alphabet = r#"{"settings_a":1,"settings_b":1,"outcomes_a":["+","-","?"],"outcomes_b":["+","-"],
                       "p":[[[[0.25,0.25],[0.25,0.25]]]]}"#;
        assert!(behavior_from_json(bad_alphabet).is_err());
        let bad_norm = r#"{"settings_a":1,"settings_b":1,"outcomes_a":["+","-"],"outcomes_b":["+","-"],
                       "p":[[[[0.25,0.25],[0.25,0.2]]]]}"#;
        assert!(matches!(behavior_from_json(bad_norm), Err(Error::BadNormalization { .. })));
        let bad_weights = r#"{"strategies":[{"fa":["+"],"fb":["-"]}],"weights":[0.9]}"#;
        assert!(matches!(model_from_json(bad_weights), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn model_file_symbols() {
        let m = LocalModel::new(
            vec![
                LocalStrategy::new(vec![Plus, Null], vec![Minus, Plus]),
                LocalStrategy::new(vec![Minus, Minus], vec![Null, Null]),
            ],
            vec![0.25, 0.75],
        )
        .unwrap();
        let text = model_to_json(&m).to_string();
        assert!(text.contains(r#"{"fa":["+","0"],"fb":["-","+"]}"#));
        assert_eq!(model_from_json(&text).unwrap(), m);
    }

    #[test]
    fn tally_file_checks_totals() {
        let s = Scenario::binary(1).unwrap();
        let t = Tally::from_counts(s, vec![1, 2, 3, 4]).unwrap();
        let v = tally_to_json(&t);
        assert_eq!(v["totals"], serde_json::json!([[10]]));
        assert_eq!(tally_from_json(&v.to_string()).unwrap(), t);
        let mut bad = v.clone();
        bad["totals"] = serde_json::json!([[11]]);
        assert!(tally_from_json(&bad.to_string()).is_err());
    }

    #[test]
    fn run_log_lines() {
        let r = RunRecord {
            index: 4,
            alpha: 2,
            beta: 0,
            a: Null,
            b: Minus,
            t_choice_a: -0.5,
            t_choice_b: -0.25,
            t_report: 1.0,
        };
        let mut buf = Vec::new();
        write_run_log(&mut buf, [r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"i\":4,\"alpha\":2,\"beta\":0,\"a\":\"0\",\"b\":\"-\",\"tca\":-0.5,\"tcb\":-0.25,\"tr\":1.0}\n"
        );
        let back = read_run_log(text.as_bytes()).unwrap();
        assert_eq!(back, vec![r]);
        let s = infer_scenario(&back).unwrap();
        assert_eq!((s.settings_a(), s.settings_b()), (3, 1));
        assert_eq!(s.outcomes_a(), Alphabet::PlusMinusNull);
        assert_eq!(s.outcomes_b(), Alphabet::PlusMinus);

        assert!(read_run_log("{\"i\":0}\n".as_bytes()).is_err());
        let positive = text.replace("-0.5", "0.5");
        assert!(read_run_log(positive.as_bytes()).is_err());
    }
}

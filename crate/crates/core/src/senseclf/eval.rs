//! Scoring for WSD key files and WiC labels.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reads `instance_id sense_id [sense_id ...]` lines.
pub fn read_keys<R: BufRead>(reader: R) -> Result<BTreeMap<String, Vec<String>>> {
    let mut keys = BTreeMap::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let mut f = line.split_whitespace();
        let Some(id) = f.next() else { continue };
        let senses: Vec<String> = f.map(str::to_owned).collect();
        if senses.is_empty() {
            return Err(Error::parse(n + 1, format!("instance {id} has no sense")));
        }
        if keys.insert(id.to_owned(), senses).is_some() {
            return Err(Error::parse(n + 1, format!("duplicate instance {id}")));
        }
    }
    Ok(keys)
}

pub fn write_keys<'a, W, I>(mut w: W, keys: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    for (id, sense) in keys {
        writeln!(w, "{id} {sense}")?;
    }
    Ok(())
}

/// Precision, recall and F1 in percent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PrfScore {
    pub gold: usize,
    pub answered: usize,
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScore {
    fn finish(&mut self) {
        let pct = |a: usize, b: usize| if b == 0 { 0.0 } else { 100.0 * a as f64 / b as f64 };
        self.precision = pct(self.correct, self.answered);
        self.recall = pct(self.correct, self.gold);
        self.f1 = if self.precision + self.recall == 0.0 {
            0.0
        } else {
            2.0 * self.precision * self.recall / (self.precision + self.recall)
        };
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WsdMetrics {
    /// Keyed by the instance-id prefix before the first `.` or `:`.
    pub per_dataset: BTreeMap<String, PrfScore>,
    pub all: PrfScore,
}

pub fn dataset_of(instance_id: &str) -> &str {
    instance_id.split(['.', ':']).next().unwrap_or(instance_id)
}

/// A prediction is correct when it matches any gold key of its instance.
/// Predictions for instances absent from `gold` are an error.
pub fn wsd_metrics(predictions: &BTreeMap<String, String>, gold: &BTreeMap<String, Vec<String>>) -> Result<WsdMetrics> {
    if let Some(id) = predictions.keys().find(|id| !gold.contains_key(*id)) {
        return Err(Error::Misaligned(format!("prediction for unknown instance {id}")));
    }
    let mut m = WsdMetrics::default();
    for (id, keys) in gold {
        let ds = m.per_dataset.entry(dataset_of(id).to_owned()).or_default();
        ds.gold += 1;
        m.all.gold += 1;
        if let Some(p) = predictions.get(id) {
            let hit = usize::from(keys.contains(p));
            ds.answered += 1;
            ds.correct += hit;
            m.all.answered += 1;
            m.all.correct += hit;
        }
    }
    m.per_dataset.values_mut().for_each(PrfScore::finish);
    m.all.finish();
    Ok(m)
}

/// Accuracy in percent.
pub fn wic_accuracy(predicted: &[bool], gold: &[bool]) -> Result<f64> {
    if predicted.len() != gold.len() {
        return Err(Error::Misaligned(format!("{} predictions for {} gold labels", predicted.len(), gold.len())));
    }
    if gold.is_empty() {
        return Err(Error::invalid("no WiC labels to score"));
    }
    let hits = predicted.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(100.0 * hits as f64 / gold.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gold() -> BTreeMap<String, Vec<String>> {
        read_keys("se2.d0.t0 a b\nse2.d0.t1 c\nse3.d0.t0 d\n".as_bytes()).unwrap()
    }

    #[test]
    fn all_correct_is_100() {
        let p: BTreeMap<String, String> =
            [("se2.d0.t0", "b"), ("se2.d0.t1", "c"), ("se3.d0.t0", "d")].map(|(a, b)| (a.into(), b.into())).into();
        let m = wsd_metrics(&p, &gold()).unwrap();
        assert_eq!(m.all.f1, 100.0);
        assert_eq!(m.per_dataset.len(), 2);
    }

    #[test]
    fn full_coverage_makes_p_r_f1_equal() {
        let p: BTreeMap<String, String> =
            [("se2.d0.t0", "x"), ("se2.d0.t1", "c"), ("se3.d0.t0", "d")].map(|(a, b)| (a.into(), b.into())).into();
        let m = wsd_metrics(&p, &gold()).unwrap();
        assert!((m.all.precision - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.all.precision, m.all.recall);
        assert!((m.all.f1 - m.all.precision).abs() < 1e-12);
        assert_eq!(m.per_dataset["se2"].correct, 1);
    }

    #[test]
    fn misaligned_ids_error() {
        let p: BTreeMap<String, String> = [("zz.1".to_string(), "a".to_string())].into();
        assert!(matches!(wsd_metrics(&p, &gold()), Err(Error::Misaligned(_))));
        assert!(wic_accuracy(&[true], &[true, false]).is_err());
    }

    #[test]
    fn key_round_trip_and_accuracy() {
        let mut buf = Vec::new();
        write_keys(&mut buf, [("a.1", "s1"), ("b:2", "s2")]).unwrap();
        let back = read_keys(buf.as_slice()).unwrap();
        assert_eq!(back["b:2"], vec!["s2".to_string()]);
        assert_eq!(dataset_of("b:2"), "b");
        assert_eq!(wic_accuracy(&[true, false, true, true], &[true, true, true, false]).unwrap(), 50.0);
        assert!(read_keys("a.1 s\na.1 t\n".as_bytes()).is_err());
    }
}

//! Collections of sequence lengths: manifest I/O, synthetic generation and
//! sub-utterance chunking.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::rng::{Domain, SeqRng};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub length: u32,
}

impl Utterance {
    pub fn new(id: impl Into<String>, length: u32) -> Self {
        Self {
            id: id.into(),
            length,
        }
    }
}

/// A non-empty, id-unique list of utterances with a cached frame total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    utterances: Vec<Utterance>,
    total_frames: u64,
}

impl Corpus {
    pub fn new(utterances: Vec<Utterance>) -> Result<Self> {
        if utterances.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut seen = HashSet::with_capacity(utterances.len());
        let mut total_frames = 0u64;
        for utt in &utterances {
            if utt.length == 0 {
                return Err(Error::NonPositiveLength {
                    id: utt.id.clone(),
                    length: 0,
                });
            }
            if !seen.insert(utt.id.as_str()) {
                return Err(Error::DuplicateId(utt.id.clone()));
            }
            total_frames += u64::from(utt.length);
        }
        Ok(Self {
            utterances,
            total_frames,
        })
    }

    /// Corpus with ordinal ids, mostly for tests and examples.
    pub fn from_lengths(lengths: &[u32]) -> Result<Self> {
        let width = ordinal_width(lengths.len());
        Self::new(
            lengths
                .iter()
                .enumerate()
                .map(|(i, &len)| Utterance::new(format!("{i:0width$}"), len))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn total_frames(&self) -> u64 {
        self.total_frames
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn get(&self, index: usize) -> Option<&Utterance> {
        self.utterances.get(index)
    }

    /// Length of utterance `index`. Panics when out of range.
    pub fn length(&self, index: usize) -> u32 {
        self.utterances[index].length
    }

    pub fn lengths(&self) -> Vec<u32> {
        self.utterances.iter().map(|u| u.length).collect()
    }

    pub fn max_length(&self) -> u32 {
        self.utterances.iter().map(|u| u.length).max().unwrap_or(0)
    }

    /// Serializes to the manifest format: `<id>\t<length>\n` per utterance.
    pub fn to_manifest(&self) -> String {
        let mut out = String::with_capacity(self.utterances.len() * 12);
        for utt in &self.utterances {
            writeln!(out, "{}\t{}", utt.id, utt.length).expect("writing to a String");
        }
        out
    }

    pub fn write_manifest(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_manifest())?;
        Ok(())
    }
}

fn ordinal_width(count: usize) -> usize {
    count.saturating_sub(1).to_string().len()
}

/// Parses manifest text. Blank lines and lines starting with `#` are skipped;
/// every other line must be `<id>\t<length>`.
pub fn parse_manifest(text: &str) -> Result<Corpus> {
    let mut utterances = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let malformed = |reason: &str| Error::Manifest {
            line,
            reason: reason.to_string(),
        };
        let (id, length) = raw
            .split_once('\t')
            .ok_or_else(|| malformed("expected `<id>\\t<length>`"))?;
        if id.is_empty() {
            return Err(malformed("empty id"));
        }
        if length.contains('\t') {
            return Err(malformed("too many fields"));
        }
        let length: i64 = length
            .trim()
            .parse()
            .map_err(|_| malformed(&format!("invalid length {length:?}")))?;
        if length < 1 {
            return Err(Error::NonPositiveLength {
                id: id.to_string(),
                length,
            });
        }
        let length = u32::try_from(length).map_err(|_| malformed("length out of range"))?;
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        utterances.push(Utterance::new(id, length));
    }
    Corpus::new(utterances)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Corpus> {
    let text = std::fs::read_to_string(path)?;
    parse_manifest(&text)
}

/// Length distribution for synthetic corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthDistribution {
    /// Integers drawn uniformly from `min..=max`.
    Uniform {
        min: u32,
        max: u32,
    },
    Lognormal {
        mu: f64,
        sigma: f64,
    },
    /// Draws from `first` with probability `weight`, otherwise from `second`.
    Bimodal {
        first: LognormalParams,
        second: LognormalParams,
        weight: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub count: usize,
    pub distribution: LengthDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_cap: Option<u32>,
}

impl SyntheticSpec {
    pub fn lognormal(count: usize, mu: f64, sigma: f64) -> Self {
        Self {
            count,
            distribution: LengthDistribution::Lognormal { mu, sigma },
            length_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSynthetic(msg));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if self.length_cap == Some(0) {
            return bad("length_cap must be at least 1".into());
        }
        let check_lognormal = |p: LognormalParams| -> Result<LogNormal<f64>> {
            if !p.mu.is_finite() || !p.sigma.is_finite() || p.sigma < 0.0 {
                return Err(Error::InvalidSynthetic(format!(
                    "lognormal needs finite mu and sigma >= 0, got mu={} sigma={}",
                    p.mu, p.sigma
                )));
            }
            LogNormal::new(p.mu, p.sigma).map_err(|e| Error::InvalidSynthetic(e.to_string()))
        };
        match &self.distribution {
            LengthDistribution::Uniform { min, max } => {
                if *min < 1 || min > max {
                    return bad(format!("uniform needs 1 <= min <= max, got {min}..={max}"));
                }
            }
            LengthDistribution::Lognormal { mu, sigma } => {
                check_lognormal(LognormalParams {
                    mu: *mu,
                    sigma: *sigma,
                })?;
            }
            LengthDistribution::Bimodal {
                first,
                second,
                weight,
            } => {
                check_lognormal(*first)?;
                check_lognormal(*second)?;
                if !(0.0..=1.0).contains(weight) {
                    return bad(format!("mixing weight must lie in [0, 1], got {weight}"));
                }
            }
        }
        Ok(())
    }
}

fn round_length(x: f64, cap: Option<u32>) -> u32 {
    // Saturating float-to-int cast; NaN cannot occur for validated params.
    let len = (x.round() as u32).max(1);
    match cap {
        Some(cap) => len.min(cap),
        None => len,
    }
}

/// Deterministic synthetic corpus. Ids are zero-padded ordinals.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = SeqRng::new(Domain::Synthetic, seed, 0);
    let lognormal = |p: LognormalParams| LogNormal::new(p.mu, p.sigma).expect("validated");
    let mut lengths = Vec::with_capacity(spec.count);
    match &spec.distribution {
        LengthDistribution::Uniform { min, max } => {
            let span = u64::from(max - min) + 1;
            for _ in 0..spec.count {
                let len = min + rng.below(span) as u32;
                lengths.push(spec.length_cap.map_or(len, |cap| len.min(cap)));
            }
        }
        LengthDistribution::Lognormal { mu, sigma } => {
            let dist = lognormal(LognormalParams {
                mu: *mu,
                sigma: *sigma,
            });
            for _ in 0..spec.count {
                lengths.push(round_length(dist.sample(&mut rng), spec.length_cap));
            }
        }
        LengthDistribution::Bimodal {
            first,
            second,
            weight,
        } => {
            let (a, b) = (lognormal(*first), lognormal(*second));
            for _ in 0..spec.count {
                let x = if rng.unit_f64() < *weight {
                    a.sample(&mut rng)
                } else {
                    b.sample(&mut rng)
                };
                lengths.push(round_length(x, spec.length_cap));
            }
        }
    }
    Corpus::from_lengths(&lengths)
}

/// Splits every utterance into pieces of at most `chunk_size` frames. Full
/// chunks come first; a shorter remainder chunk closes each utterance.
pub fn chunk_corpus(corpus: &Corpus, chunk_size: u32) -> Result<Corpus> {
    if chunk_size == 0 {
        return Err(Error::InvalidParameter(
            "chunk_size must be at least 1".into(),
        ));
    }
    let mut out = Vec::with_capacity(corpus.len());
    for utt in corpus.utterances() {
        let full = utt.length / chunk_size;
        let rest = utt.length % chunk_size;
        let pieces = full + u32::from(rest > 0);
        for k in 0..pieces {
            let len = if k < full { chunk_size } else { rest };
            out.push(Utterance::new(format!("{}/{k}", utt.id), len));
        }
    }
    Corpus::new(out)
}

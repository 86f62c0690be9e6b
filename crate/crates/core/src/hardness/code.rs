use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

const MAX_RESAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeMode {
    Hadamard,
    RandomLinear,
}

impl std::str::FromStr for CodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hadamard" => Ok(Self::Hadamard),
            "random-linear" => Ok(Self::RandomLinear),
            other => Err(Error::Code(format!("unknown code mode {other:?}"))),
        }
    }
}

/// `s` binary words of length `t` whose weights and pairwise Hamming
/// distances all lie in `[(1/2 − η) t, (1/2 + η) t]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeBook {
    pub t: usize,
    pub eta: f64,
    pub mode: CodeMode,
    #[serde(serialize_with = "bit_strings")]
    pub words: Vec<Vec<bool>>,
}

fn bit_strings<S: Serializer>(words: &[Vec<bool>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(words.iter().map(|w| {
        w.iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect::<String>()
    }))
}

fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

impl CodeBook {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn interval(&self) -> (f64, f64) {
        let t = self.t as f64;
        ((0.5 - self.eta) * t, (0.5 + self.eta) * t)
    }

    /// Checks every weight and every pairwise distance.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval();
        let inside = |x: usize| (x as f64) >= lo - 1e-9 && (x as f64) <= hi + 1e-9;
        for (i, w) in self.words.iter().enumerate() {
            if w.len() != self.t {
                return Err(Error::Code(format!(
                    "word {i} has length {} instead of {}",
                    w.len(),
                    self.t
                )));
            }
            let weight = w.iter().filter(|&&b| b).count();
            if !inside(weight) {
                return Err(Error::Code(format!(
                    "word {i} has weight {weight} outside [{lo}, {hi}]"
                )));
            }
            for (j, v) in self.words.iter().enumerate().skip(i + 1) {
                let d = hamming(w, v);
                if !inside(d) {
                    return Err(Error::Code(format!(
                        "words {i} and {j} are at distance {d} outside [{lo}, {hi}]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Hadamard codes give `η = 0` with `t = 2^b ≥ s + 1`; random linear codes
/// use `t = ⌈log₂ max(s, 2) / η²⌉` and resample the generator matrix until
/// the balance check passes.
pub fn build_code(s: usize, eta: f64, mode: CodeMode, seed: u64) -> Result<CodeBook> {
    if s == 0 {
        return Err(Error::Code("a code needs at least one word".into()));
    }
    let bits = usize::BITS - s.leading_zeros();
    let book = match mode {
        CodeMode::Hadamard => {
            if !(0.0..0.5).contains(&eta) {
                return Err(Error::Code(format!("eta must lie in [0, 1/2), got {eta}")));
            }
            let t = 1usize << bits;
            let words = (1..=s)
                .map(|a| (0..t).map(|x| (a & x).count_ones() % 2 == 1).collect())
                .collect();
            CodeBook {
                t,
                eta: 0.0,
                mode,
                words,
            }
        }
        CodeMode::RandomLinear => {
            if !(eta > 0.0 && eta < 0.5) {
                return Err(Error::Code(format!(
                    "random linear codes need eta in (0, 1/2), got {eta}"
                )));
            }
            let t = ((s.max(2) as f64).log2() / (eta * eta)).ceil() as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut attempt = 0;
            loop {
                let generator: Vec<Vec<bool>> = (0..bits)
                    .map(|_| (0..t).map(|_| rng.random()).collect())
                    .collect();
                let words = (1..=s)
                    .map(|a| {
                        (0..t)
                            .map(|x| {
                                (0..bits as usize)
                                    .filter(|&r| a >> r & 1 == 1)
                                    .fold(false, |acc, r| acc ^ generator[r][x])
                            })
                            .collect()
                    })
                    .collect();
                let book = CodeBook {
                    t,
                    eta,
                    mode,
                    words,
                };
                if book.validate().is_ok() {
                    break book;
                }
                attempt += 1;
                if attempt == MAX_RESAMPLES {
                    return Err(Error::Code(format!(
                        "no balanced generator found for s = {s}, eta = {eta} at t = {t} after {MAX_RESAMPLES} draws; use a larger eta or the Hadamard code"
                    )));
                }
            }
        }
    };
    book.validate()?;
    Ok(book)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_three_words() {
        let c = build_code(3, 0.0, CodeMode::Hadamard, 0).unwrap();
        assert_eq!(c.t, 4);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["words"], serde_json::json!(["0101", "0011", "0110"]));
    }

    #[test]
    fn hadamard_is_exactly_balanced() {
        for s in [1, 2, 7, 8, 15, 20] {
            let c = build_code(s, 0.0, CodeMode::Hadamard, 0).unwrap();
            assert!(c.t > s);
            for w in &c.words {
                assert_eq!(w.iter().filter(|&&b| b).count() * 2, c.t);
            }
        }
    }

    #[test]
    fn random_linear_golden() {
        let c = build_code(16, 0.25, CodeMode::RandomLinear, 42).unwrap();
        assert_eq!(c.t, 64);
        assert_eq!(c.len(), 16);
        assert_eq!(c.interval(), (16.0, 48.0));
        assert_eq!(c, build_code(16, 0.25, CodeMode::RandomLinear, 42).unwrap());
    }

    #[test]
    fn bad_parameters() {
        assert!(build_code(0, 0.0, CodeMode::Hadamard, 0).is_err());
        assert!(build_code(4, 0.0, CodeMode::RandomLinear, 0).is_err());
        assert!(build_code(4, 0.5, CodeMode::RandomLinear, 0).is_err());
        assert!("nope".parse::<CodeMode>().is_err());
    }
}

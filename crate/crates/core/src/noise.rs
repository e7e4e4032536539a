//! Exact truth-table construction, the seeded random-noise operator, and
//! the binary table/mask file formats.
//!
//! A [`TruthTable`] holds every evaluation of a problem at a fixed size,
//! bit-packed at the problem's declared value width. [`corrupt`] selects a
//! seeded random set of entries — either an exact `floor(delta * N)`-size
//! subset or i.i.d. per-entry coin flips — and a [`CorruptedTable`] serves
//! queries with the selected entries rewritten by the chosen strategy.
//! Everything is reproducible from the seed alone; corrupted values depend
//! only on `(seed, index)`, never on query order.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;

use crate::ratio::Ratio64;
use crate::rng::{derive_seed, keyed_below, keyed_hash, SplitMix64};
use crate::aggregate::{
    eval_bruteforce, InstanceIndex, Problem, ProblemSpec, SemigroupId, SemigroupValue,
};
use crate::{Error, Result};

/// Default in-memory table budget in entries.
pub const TABLE_BUDGET: u64 = 1 << 24;

const MASK_STREAM: u64 = 0x6d61_736b; // "mask"
const VALUE_STREAM: u64 = 0x7661_6c75; // "valu"

/// Bit-packed table of every evaluation of one problem at one size.
#[derive(Debug, Clone)]
pub struct TruthTable {
    problem_id: String,
    n: u32,
    entry_count: u64,
    value_bits: u8,
    semigroup: SemigroupId,
    words: Vec<u64>,
}

fn bits_for(max_value: u64) -> u8 {
    (64 - max_value.leading_zeros()).max(1) as u8
}

fn words_for(entries: u64, value_bits: u8) -> usize {
    ((entries as u128 * value_bits as u128 + 63) / 64) as usize
}

impl TruthTable {
    pub fn problem_id(&self) -> &str {
        &self.problem_id
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn entry_count(&self) -> u64 {
        self.entry_count
    }

    pub fn value_bits(&self) -> u8 {
        self.value_bits
    }

    pub fn semigroup(&self) -> SemigroupId {
        self.semigroup
    }

    /// Packed raw value of entry `i`.
    pub fn raw(&self, i: u64) -> u64 {
        debug_assert!(i < self.entry_count);
        read_packed(&self.words, i, self.value_bits)
    }

    pub fn value(&self, i: u64) -> SemigroupValue {
        SemigroupValue::from_raw(self.semigroup, self.raw(i))
    }

    /// Serializes to the `STB1` binary format.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(b"STB1")?;
        w.write_all(&1u16.to_le_bytes())?;
        write_string(w, &self.problem_id)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.entry_count.to_le_bytes())?;
        w.write_all(&[self.value_bits])?;
        write_bit_payload(
            w,
            &self.words,
            self.entry_count as u128 * self.value_bits as u128,
        )?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)
    }

    /// Reads the `STB1` format, validating the binding against `expected`.
    pub fn read_from<R: Read>(r: &mut R, expected: &dyn Problem) -> Result<TruthTable> {
        expect_magic(r, b"STB1")?;
        let version = read_u16(r)?;
        if version != 1 {
            return Err(Error::Format(format!("unsupported table version {version}")));
        }
        let problem_id = read_string(r)?;
        let n = read_u64(r)? as u32;
        let entry_count = read_u64(r)?;
        let value_bits = read_u8(r)?;
        if problem_id != expected.id() || n != expected.n() {
            return Err(Error::BindingMismatch {
                table: problem_id,
                table_n: n,
                expected: expected.id(),
                expected_n: expected.n(),
            });
        }
        if entry_count != expected.instance_count() || value_bits != bits_for(expected.max_value())
        {
            return Err(Error::Format(
                "table geometry does not match the problem".into(),
            ));
        }
        let words = read_bit_payload(r, entry_count as u128 * value_bits as u128)?;
        Ok(TruthTable {
            problem_id,
            n,
            entry_count,
            value_bits,
            semigroup: expected.semigroup(),
            words,
        })
    }

    pub fn load(path: &Path, expected: &dyn Problem) -> Result<TruthTable> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f, expected)
    }
}

fn read_packed(words: &[u64], i: u64, value_bits: u8) -> u64 {
    let vb = value_bits as u64;
    let bit = i * vb;
    let word = (bit / 64) as usize;
    let off = bit % 64;
    let mask = if vb == 64 { u64::MAX } else { (1u64 << vb) - 1 };
    let lo = words[word] >> off;
    let v = if off + vb <= 64 {
        lo
    } else {
        lo | words[word + 1] << (64 - off)
    };
    v & mask
}

fn write_packed(words: &mut [u64], i: u64, value_bits: u8, value: u64) {
    let vb = value_bits as u64;
    let bit = i * vb;
    let word = (bit / 64) as usize;
    let off = bit % 64;
    let mask = if vb == 64 { u64::MAX } else { (1u64 << vb) - 1 };
    debug_assert_eq!(value & !mask, 0);
    words[word] &= !(mask << off);
    words[word] |= value << off;
    if off + vb > 64 {
        let spill = off + vb - 64;
        let hi_mask = (1u64 << spill) - 1;
        words[word + 1] &= !hi_mask;
        words[word + 1] |= value >> (64 - off);
    }
}

/// Builds the exact truth table with the default memory budget.
///
/// `parallelism = 0` uses all cores. Table content is identical for every
/// parallelism setting.
pub fn build_table(problem: &dyn Problem, parallelism: usize) -> Result<TruthTable> {
    build_table_budgeted(problem, parallelism, TABLE_BUDGET)
}

pub fn build_table_budgeted(
    problem: &dyn Problem,
    parallelism: usize,
    budget: u64,
) -> Result<TruthTable> {
    let entries = problem.instance_count();
    if entries > budget {
        return Err(Error::TableBudgetExceeded {
            count: BigUint::from(entries),
            budget,
        });
    }
    let value_bits = bits_for(problem.max_value());
    let mut words = vec![0u64; words_for(entries, value_bits)];

    // 65536-entry chunks start on a word boundary for every value width,
    // so chunks own disjoint word ranges and can fill in parallel.
    const CHUNK_ENTRIES: u64 = 65536;
    let words_per_chunk = (CHUNK_ENTRIES * value_bits as u64 / 64) as usize;

    let fill = |chunk_idx: usize, chunk_words: &mut [u64]| -> Result<()> {
        let start = chunk_idx as u64 * CHUNK_ENTRIES;
        let end = (start + CHUNK_ENTRIES).min(entries);
        for i in start..end {
            let value = eval_bruteforce(problem, InstanceIndex(i))?;
            write_packed(chunk_words, i - start, value_bits, value.to_raw());
        }
        Ok(())
    };

    let run = |words: &mut Vec<u64>| -> Result<()> {
        use rayon::prelude::*;
        if words_per_chunk == 0 || words.len() <= words_per_chunk {
            return fill(0, &mut words[..]);
        }
        words
            .par_chunks_mut(words_per_chunk)
            .enumerate()
            .try_for_each(|(c, chunk)| fill(c, chunk))
    };

    if parallelism > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| Error::Format(format!("thread pool: {e}")))?;
        pool.install(|| run(&mut words))?;
    } else {
        run(&mut words)?;
    }

    Ok(TruthTable {
        problem_id: problem.id(),
        n: problem.n(),
        entry_count: entries,
        value_bits,
        semigroup: problem.semigroup(),
        words,
    })
}

/// How the selected entries are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum NoiseModel {
    /// Exactly `floor(delta * N)` entries, a uniformly random subset.
    ExactFraction,
    /// Each entry independently with probability `delta`; the only model
    /// available for lazily evaluated tables.
    IidBernoulli,
}

/// How a selected entry is rewritten.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CorruptionStrategy {
    /// Negate the Boolean value. Boolean tables only.
    FlipBoolean,
    /// Uniform draw from the value range excluding the true value.
    ReplaceUniformWrong,
    /// Write this raw value; entries whose true value equals it fall back
    /// to [`CorruptionStrategy::ReplaceUniformWrong`] so every selected
    /// entry actually changes.
    Constant(u64),
}

/// Record of which entries a noise application touched.
#[derive(Debug, Clone)]
pub struct CorruptionMask {
    problem_id: String,
    n: u32,
    entry_count: u64,
    seed: u64,
    model: NoiseModel,
    delta: Ratio64,
    bits: Vec<u64>,
    count: u64,
}

impl CorruptionMask {
    /// Draws the selected set for `(seed, model, delta, entry_count)`.
    pub fn generate(
        problem_id: &str,
        n: u32,
        entry_count: u64,
        delta: Ratio64,
        seed: u64,
        model: NoiseModel,
    ) -> Result<CorruptionMask> {
        if delta.cmp_fraction(1, 1) != std::cmp::Ordering::Less {
            return Err(Error::BadDelta(delta.to_string()));
        }
        let mut bits = vec![0u64; entry_count.div_ceil(64) as usize];
        let count;
        match model {
            NoiseModel::ExactFraction => {
                count = delta.floor_times(entry_count);
                // Partial Fisher-Yates over a virtual identity array: the
                // values landing in slots 0..count form a uniform subset.
                let mut rng = SplitMix64::new(derive_seed(seed, MASK_STREAM));
                let mut displaced: HashMap<u64, u64> = HashMap::new();
                for i in 0..count {
                    let j = i + rng.below(entry_count - i);
                    let pick = displaced.get(&j).copied().unwrap_or(j);
                    let at_i = displaced.get(&i).copied().unwrap_or(i);
                    bits[(pick / 64) as usize] |= 1 << (pick % 64);
                    displaced.insert(j, at_i);
                }
            }
            NoiseModel::IidBernoulli => {
                let mut selected = 0u64;
                for i in 0..entry_count {
                    if bernoulli_hit(seed, i, delta) {
                        bits[(i / 64) as usize] |= 1 << (i % 64);
                        selected += 1;
                    }
                }
                count = selected;
            }
        }
        Ok(CorruptionMask {
            problem_id: problem_id.to_string(),
            n,
            entry_count,
            seed,
            model,
            delta,
            bits,
            count,
        })
    }

    pub fn selected(&self, i: u64) -> bool {
        self.bits[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn entry_count(&self) -> u64 {
        self.entry_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn model(&self) -> NoiseModel {
        self.model
    }

    pub fn delta(&self) -> Ratio64 {
        self.delta
    }

    pub fn problem_id(&self) -> &str {
        &self.problem_id
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Serializes to the `SMK1` binary format.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(b"SMK1")?;
        w.write_all(&1u16.to_le_bytes())?;
        write_string(w, &self.problem_id)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.entry_count.to_le_bytes())?;
        w.write_all(&[1u8])?; // mask entries are single bits
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&[match self.model {
            NoiseModel::ExactFraction => 0u8,
            NoiseModel::IidBernoulli => 1u8,
        }])?;
        w.write_all(&self.delta.num().to_le_bytes())?;
        w.write_all(&self.delta.den().to_le_bytes())?;
        write_bit_payload(w, &self.bits, self.entry_count as u128)?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<CorruptionMask> {
        expect_magic(r, b"SMK1")?;
        let version = read_u16(r)?;
        if version != 1 {
            return Err(Error::Format(format!("unsupported mask version {version}")));
        }
        let problem_id = read_string(r)?;
        let n = read_u64(r)? as u32;
        let entry_count = read_u64(r)?;
        let width = read_u8(r)?;
        if width != 1 {
            return Err(Error::Format("mask width must be 1".into()));
        }
        let seed = read_u64(r)?;
        let model = match read_u8(r)? {
            0 => NoiseModel::ExactFraction,
            1 => NoiseModel::IidBernoulli,
            other => return Err(Error::Format(format!("unknown noise model {other}"))),
        };
        let num = read_u64(r)?;
        let den = read_u64(r)?;
        let delta = Ratio64::new(num, den)?;
        let bits = read_bit_payload(r, entry_count as u128)?;
        let count = bits.iter().map(|w| w.count_ones() as u64).sum();
        Ok(CorruptionMask {
            problem_id,
            n,
            entry_count,
            seed,
            model,
            delta,
            bits,
            count,
        })
    }

    pub fn load(path: &Path) -> Result<CorruptionMask> {
        let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut f)
    }
}

fn bernoulli_hit(seed: u64, index: u64, delta: Ratio64) -> bool {
    // Threshold comparison on a keyed hash; lazy-compatible.
    let threshold = ((delta.num() as u128) << 64) / delta.den() as u128;
    (keyed_hash(derive_seed(seed, MASK_STREAM), index, 0) as u128) < threshold
}

/// Per-subset exact uncorrupted fractions, for concentration checks.
pub fn mask_stats(mask: &CorruptionMask, subsets: &[Vec<u64>]) -> Vec<f64> {
    subsets
        .iter()
        .map(|subset| {
            if subset.is_empty() {
                return 1.0;
            }
            let hit = subset.iter().filter(|&&i| mask.selected(i)).count();
            1.0 - hit as f64 / subset.len() as f64
        })
        .collect()
}

enum TableSource {
    Materialized(Arc<TruthTable>),
    Lazy(ProblemSpec),
}

enum MaskSource {
    Dense(CorruptionMask),
    LazyBernoulli { seed: u64, delta: Ratio64 },
}

/// Oracle access to a noised truth table, counting every query.
pub struct CorruptedTable {
    source: TableSource,
    mask: MaskSource,
    strategy: CorruptionStrategy,
    value_seed: u64,
    max_value: u64,
    semigroup: SemigroupId,
    entry_count: u64,
    counter: AtomicU64,
}

/// Applies the noise operator to a materialized table.
pub fn corrupt(
    table: Arc<TruthTable>,
    delta: Ratio64,
    seed: u64,
    model: NoiseModel,
    strategy: CorruptionStrategy,
) -> Result<(CorruptedTable, CorruptionMask)> {
    let max_value = (1u64 << table.value_bits.min(63)) - 1;
    validate_strategy(strategy, table.semigroup, max_value)?;
    let mask = CorruptionMask::generate(
        &table.problem_id,
        table.n,
        table.entry_count,
        delta,
        seed,
        model,
    )?;
    let corrupted = CorruptedTable {
        entry_count: table.entry_count,
        semigroup: table.semigroup,
        source: TableSource::Materialized(table),
        mask: MaskSource::Dense(mask.clone()),
        strategy,
        value_seed: derive_seed(seed, VALUE_STREAM),
        max_value,
        counter: AtomicU64::new(0),
    };
    Ok((corrupted, mask))
}

/// Rebinds a stored mask to a table, e.g. after loading both from disk.
pub fn corrupt_with_mask(
    table: Arc<TruthTable>,
    mask: CorruptionMask,
    strategy: CorruptionStrategy,
) -> Result<CorruptedTable> {
    if mask.problem_id != table.problem_id
        || mask.n != table.n
        || mask.entry_count != table.entry_count
    {
        return Err(Error::BindingMismatch {
            table: table.problem_id.clone(),
            table_n: table.n,
            expected: mask.problem_id.clone(),
            expected_n: mask.n,
        });
    }
    let max_value = (1u64 << table.value_bits.min(63)) - 1;
    validate_strategy(strategy, table.semigroup, max_value)?;
    let value_seed = derive_seed(mask.seed, VALUE_STREAM);
    Ok(CorruptedTable {
        entry_count: table.entry_count,
        semigroup: table.semigroup,
        source: TableSource::Materialized(table),
        mask: MaskSource::Dense(mask),
        strategy,
        value_seed,
        max_value,
        counter: AtomicU64::new(0),
    })
}

/// Oracle-backed corrupted table for instance spaces too large to
/// materialize; necessarily [`NoiseModel::IidBernoulli`].
pub fn corrupt_lazy(
    problem: ProblemSpec,
    delta: Ratio64,
    seed: u64,
    strategy: CorruptionStrategy,
) -> Result<CorruptedTable> {
    if delta.cmp_fraction(1, 1) != std::cmp::Ordering::Less {
        return Err(Error::BadDelta(delta.to_string()));
    }
    let max_value = problem.max_value();
    validate_strategy(strategy, problem.semigroup(), max_value)?;
    Ok(CorruptedTable {
        entry_count: problem.instance_count(),
        semigroup: problem.semigroup(),
        source: TableSource::Lazy(problem),
        mask: MaskSource::LazyBernoulli { seed, delta },
        strategy,
        value_seed: derive_seed(seed, VALUE_STREAM),
        max_value,
        counter: AtomicU64::new(0),
    })
}

fn validate_strategy(
    strategy: CorruptionStrategy,
    semigroup: SemigroupId,
    max_value: u64,
) -> Result<()> {
    match strategy {
        CorruptionStrategy::FlipBoolean => {
            let boolean = matches!(semigroup, SemigroupId::BoolOr | SemigroupId::BoolXor);
            if !boolean || max_value != 1 {
                return Err(Error::FlipNeedsBoolean(max_value));
            }
        }
        CorruptionStrategy::ReplaceUniformWrong | CorruptionStrategy::Constant(_) => {
            if max_value == 0 {
                return Err(Error::FlipNeedsBoolean(0));
            }
        }
    }
    Ok(())
}

impl CorruptedTable {
    pub fn problem_id(&self) -> String {
        match &self.source {
            TableSource::Materialized(t) => t.problem_id.clone(),
            TableSource::Lazy(p) => p.id(),
        }
    }

    pub fn n(&self) -> u32 {
        match &self.source {
            TableSource::Materialized(t) => t.n,
            TableSource::Lazy(p) => p.n(),
        }
    }

    pub fn entry_count(&self) -> u64 {
        self.entry_count
    }

    pub fn semigroup(&self) -> SemigroupId {
        self.semigroup
    }

    /// Number of queries served so far.
    pub fn queries_made(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }

    fn is_selected(&self, i: u64) -> bool {
        match &self.mask {
            MaskSource::Dense(mask) => mask.selected(i),
            MaskSource::LazyBernoulli { seed, delta } => bernoulli_hit(*seed, i, *delta),
        }
    }

    /// Uncorrupted value of entry `i`; the ground truth for sweeps.
    pub fn true_value(&self, i: u64) -> Result<SemigroupValue> {
        if i >= self.entry_count {
            return Err(Error::IndexOutOfRange {
                index: i,
                count: self.entry_count,
            });
        }
        match &self.source {
            TableSource::Materialized(t) => Ok(t.value(i)),
            TableSource::Lazy(p) => eval_bruteforce(p.as_ref(), InstanceIndex(i)),
        }
    }

    /// Oracle query: the corrupted-or-true value of entry `i`. Increments
    /// the query counter.
    pub fn query(&self, i: u64) -> Result<SemigroupValue> {
        if i >= self.entry_count {
            return Err(Error::IndexOutOfRange {
                index: i,
                count: self.entry_count,
            });
        }
        self.counter.fetch_add(1, Ordering::Relaxed);
        let truth = self.true_value(i)?.to_raw();
        if !self.is_selected(i) {
            return Ok(SemigroupValue::from_raw(self.semigroup, truth));
        }
        let corrupted = match self.strategy {
            CorruptionStrategy::FlipBoolean => 1 - truth,
            CorruptionStrategy::ReplaceUniformWrong => self.wrong_value(i, truth),
            CorruptionStrategy::Constant(d) => {
                let d = d.min(self.max_value);
                if d != truth {
                    d
                } else {
                    self.wrong_value(i, truth)
                }
            }
        };
        debug_assert_ne!(corrupted, truth);
        Ok(SemigroupValue::from_raw(self.semigroup, corrupted))
    }

    /// Uniform draw from `[0, max_value] \ {truth}`, stable per index.
    fn wrong_value(&self, i: u64, truth: u64) -> u64 {
        let w = keyed_below(self.value_seed, i, self.max_value);
        if w < truth {
            w
        } else {
            w + 1
        }
    }
}

// --- little binary-format helpers ---------------------------------------

fn write_string<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_le_bytes(len) as usize;
    if len > 1 << 16 {
        return Err(Error::Format("unreasonable string length".into()));
    }
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::Format("problem id is not UTF-8".into()))
}

fn read_u8<R: Read>(r: &mut R) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u16<R: Read>(r: &mut R) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    if &b != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            b, magic
        )));
    }
    Ok(())
}

/// Writes `bit_len` bits of `words`, least-significant bit first, padded to
/// whole bytes.
fn write_bit_payload<W: Write>(w: &mut W, words: &[u64], bit_len: u128) -> Result<()> {
    let byte_len = ((bit_len + 7) / 8) as usize;
    let mut bytes = Vec::with_capacity(byte_len);
    'outer: for word in words {
        for b in word.to_le_bytes() {
            if bytes.len() == byte_len {
                break 'outer;
            }
            bytes.push(b);
        }
    }
    bytes.resize(byte_len, 0);
    w.write_all(&bytes)?;
    Ok(())
}

fn read_bit_payload<R: Read>(r: &mut R, bit_len: u128) -> Result<Vec<u64>> {
    let byte_len = ((bit_len + 7) / 8) as usize;
    let mut bytes = vec![0u8; byte_len];
    r.read_exact(&mut bytes)?;
    bytes.resize(byte_len.div_ceil(8) * 8, 0);
    let words = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(words)
}

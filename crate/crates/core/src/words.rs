//! Ultimately periodic words, their block structure, and the coding of
//! integer sequences as words over `{a, b}`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("lasso period must be non-empty")]
    EmptyPeriod,
    #[error("malformed lasso literal `{0}`: expected `prefix|period`")]
    Malformed(String),
    #[error("bad integer `{0}` in integer lasso")]
    BadInteger(String),
    #[error("bad block `{0}`: expected `a_len:b_len` with both positive")]
    BadBlock(String),
    #[error("word {0} is not a block word (must start with a and repeat both a and b)")]
    NotInZ(String),
}

/// Cuts `(prefix, period)` to its canonical form: the period is replaced
/// by its primitive root, then trailing prefix items that agree with the
/// end of the period are rotated into it.
fn canonicalize<T: Clone + PartialEq>(prefix: &mut Vec<T>, period: &mut Vec<T>) {
    let n = period.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d]) {
            period.truncate(d);
            break;
        }
    }
    while let (Some(p), Some(q)) = (prefix.last(), period.last()) {
        if p != q {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
}

/// The ω-word `prefix · period^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LassoWord {
    prefix: Vec<char>,
    period: Vec<char>,
}

impl LassoWord {
    pub fn new(
        prefix: impl Into<Vec<char>>,
        period: impl Into<Vec<char>>,
    ) -> Result<Self, WordError> {
        let period = period.into();
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        Ok(Self {
            prefix: prefix.into(),
            period,
        })
    }

    pub fn from_strs(prefix: &str, period: &str) -> Result<Self, WordError> {
        Self::new(
            prefix.chars().collect::<Vec<_>>(),
            period.chars().collect::<Vec<_>>(),
        )
    }

    /// Parses `u|v`.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let (u, v) = s
            .split_once('|')
            .ok_or_else(|| WordError::Malformed(s.to_string()))?;
        if v.contains('|') || u.chars().chain(v.chars()).any(char::is_whitespace) {
            return Err(WordError::Malformed(s.to_string()));
        }
        Self::from_strs(u, v)
    }

    pub fn prefix(&self) -> &[char] {
        &self.prefix
    }

    pub fn period(&self) -> &[char] {
        &self.period
    }

    /// Number of distinct lasso positions, `|u| + |v|`.
    pub fn positions(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    /// Letter read at lasso position `pos < positions()`.
    pub fn letter_at_position(&self, pos: usize) -> char {
        if pos < self.prefix.len() {
            self.prefix[pos]
        } else {
            self.period[pos - self.prefix.len()]
        }
    }

    /// Lasso position reached after reading the letter at `pos`.
    pub fn next_position(&self, pos: usize) -> usize {
        if pos + 1 < self.positions() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    /// Letter at index `i` of the infinite word.
    pub fn letter(&self, i: usize) -> char {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// Lasso position of letter index `i`.
    pub fn position_of_index(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            i
        } else {
            self.prefix.len() + (i - self.prefix.len()) % self.period.len()
        }
    }

    /// First `len` letters.
    pub fn expand(&self, len: usize) -> String {
        (0..len).map(|i| self.letter(i)).collect()
    }

    /// Whether the word splits into blocks `a^n b^k`: it starts with `a`,
    /// and both `a` and `b` occur infinitely often. Other letters disqualify it.
    pub fn is_block_word(&self) -> bool {
        let only_ab = self
            .prefix
            .iter()
            .chain(&self.period)
            .all(|&c| c == 'a' || c == 'b');
        only_ab && self.letter(0) == 'a' && self.period.contains(&'a') && self.period.contains(&'b')
    }

    /// The block sequence of the word, in canonical form (shortest period,
    /// earliest alignment).
    pub fn decompose_blocks(&self) -> Result<BlockLasso, WordError> {
        if !self.is_block_word() {
            return Err(WordError::NotInZ(self.to_string()));
        }
        let u = self.prefix.len();
        let p = self.period.len();
        // From index u + 1 on, "is a block start" depends only on the phase
        // modulo p, so the first start at or after u + 1 anchors the period.
        let is_start = |s: usize| self.letter(s) == 'a' && (s == 0 || self.letter(s - 1) == 'b');
        let anchor = (u + 1..u + 1 + p)
            .find(|&s| is_start(s))
            .expect("period containing both letters has a block start");
        let prefix = blocks_of(&self.expand(anchor));
        let window: String = (anchor..anchor + p).map(|i| self.letter(i)).collect();
        let period = blocks_of(&window);
        Ok(BlockLasso::canonical(prefix, period))
    }
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u: String = self.prefix.iter().collect();
        let v: String = self.period.iter().collect();
        write!(f, "{u}|{v}")
    }
}

/// Splits a finite word of the form `(a+ b+)*` into blocks.
fn blocks_of(word: &str) -> Vec<Block> {
    let mut out = Vec::new();
    let bytes: Vec<char> = word.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let a_start = i;
        while i < bytes.len() && bytes[i] == 'a' {
            i += 1;
        }
        let b_start = i;
        while i < bytes.len() && bytes[i] == 'b' {
            i += 1;
        }
        debug_assert!(b_start > a_start && i > b_start, "not a block word: {word}");
        out.push(Block::new((b_start - a_start) as u64, (i - b_start) as u64));
    }
    out
}

/// A maximal segment `a^a_len b^b_len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub a_len: u64,
    pub b_len: u64,
}

impl Block {
    pub fn new(a_len: u64, b_len: u64) -> Self {
        Self { a_len, b_len }
    }

    /// At least as many `b`s as `a`s.
    pub fn is_positive(&self) -> bool {
        self.b_len >= self.a_len
    }

    /// Counter change when the block is used: `b_len - a_len`.
    pub fn net(&self) -> i64 {
        self.b_len as i64 - self.a_len as i64
    }

    pub fn len(&self) -> u64 {
        self.a_len + self.b_len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn letters(&self) -> String {
        "a".repeat(self.a_len as usize) + &"b".repeat(self.b_len as usize)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.a_len, self.b_len)
    }
}

/// Ultimately periodic block sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockLasso {
    prefix: Vec<Block>,
    period: Vec<Block>,
}

impl BlockLasso {
    pub fn new(prefix: Vec<Block>, period: Vec<Block>) -> Result<Self, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        if let Some(b) = prefix
            .iter()
            .chain(&period)
            .find(|b| b.a_len == 0 || b.b_len == 0)
        {
            return Err(WordError::BadBlock(b.to_string()));
        }
        Ok(Self { prefix, period })
    }

    fn canonical(mut prefix: Vec<Block>, mut period: Vec<Block>) -> Self {
        canonicalize(&mut prefix, &mut period);
        Self { prefix, period }
    }

    /// Canonical form of the same block sequence.
    pub fn canonicalized(&self) -> Self {
        Self::canonical(self.prefix.clone(), self.period.clone())
    }

    /// Parses `1:1,5:1|2:1` (prefix blocks, `|`, period blocks).
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let (u, v) = s
            .split_once('|')
            .ok_or_else(|| WordError::Malformed(s.to_string()))?;
        let parse_list = |part: &str| -> Result<Vec<Block>, WordError> {
            part.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    let (a, b) = t
                        .split_once(':')
                        .ok_or_else(|| WordError::BadBlock(t.into()))?;
                    let a: u64 = a
                        .trim()
                        .parse()
                        .map_err(|_| WordError::BadBlock(t.into()))?;
                    let b: u64 = b
                        .trim()
                        .parse()
                        .map_err(|_| WordError::BadBlock(t.into()))?;
                    Ok(Block::new(a, b))
                })
                .collect()
        };
        Self::new(parse_list(u)?, parse_list(v)?)
    }

    pub fn prefix(&self) -> &[Block] {
        &self.prefix
    }

    pub fn period(&self) -> &[Block] {
        &self.period
    }

    pub fn block(&self, i: usize) -> Block {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The infinite block sequence.
    pub fn blocks(&self) -> impl Iterator<Item = Block> + '_ {
        (0..).map(|i| self.block(i))
    }

    /// The word these blocks spell, as a lasso.
    pub fn to_word(&self) -> LassoWord {
        let u: String = self.prefix.iter().map(Block::letters).collect();
        let v: String = self.period.iter().map(Block::letters).collect();
        LassoWord::from_strs(&u, &v).expect("non-empty period")
    }
}

impl fmt::Display for BlockLasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |bs: &[Block]| {
            bs.iter()
                .map(Block::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}|{}", join(&self.prefix), join(&self.period))
    }
}

/// Ultimately periodic sequence of natural numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegerLasso {
    prefix: Vec<u64>,
    period: Vec<u64>,
}

impl IntegerLasso {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self, WordError> {
        if period.is_empty() {
            return Err(WordError::EmptyPeriod);
        }
        Ok(Self { prefix, period })
    }

    /// Parses `m0,m1|p0,p1`.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let (u, v) = s
            .split_once('|')
            .ok_or_else(|| WordError::Malformed(s.to_string()))?;
        let list = |part: &str| -> Result<Vec<u64>, WordError> {
            part.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| WordError::BadInteger(t.to_string())))
                .collect()
        };
        Self::new(list(u)?, list(v)?)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    pub fn value(&self, i: usize) -> u64 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn canonical(&self) -> Self {
        let mut prefix = self.prefix.clone();
        let mut period = self.period.clone();
        canonicalize(&mut prefix, &mut period);
        Self { prefix, period }
    }

    /// `liminf` of the sequence: the smallest value of the period.
    pub fn liminf_value(&self) -> u64 {
        *self.period.iter().min().expect("non-empty period")
    }

    /// Finite liminf. Always true for a finitely presented lasso.
    pub fn has_finite_liminf(&self) -> bool {
        true
    }

    /// Divergence to infinity. A periodic tail never diverges.
    pub fn tends_to_infinity(&self) -> bool {
        false
    }

    /// Each `m` contributes `a^(m+1) b^(m+1)`.
    pub fn block_code(&self) -> LassoWord {
        let enc = |xs: &[u64]| -> Vec<char> { xs.iter().flat_map(|&m| code_block(m)).collect() };
        LassoWord::new(enc(&self.prefix), enc(&self.period)).expect("non-empty period")
    }
}

impl fmt::Display for IntegerLasso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{}|{}", join(&self.prefix), join(&self.period))
    }
}

fn code_block(m: u64) -> impl Iterator<Item = char> {
    let n = m as usize + 1;
    std::iter::repeat_n('a', n).chain(std::iter::repeat_n('b', n))
}

/// Code of the first `count` values of an arbitrary (not necessarily
/// periodic) sequence.
pub fn block_code_prefix(mut generator: impl FnMut(usize) -> u64, count: usize) -> String {
    (0..count).flat_map(|i| code_block(generator(i))).collect()
}

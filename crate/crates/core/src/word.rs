//! Letters, freely reduced words, and the free-group operations every other
//! module is built on.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// A generator or variable name. Cheap to clone and shareable across threads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `[A-Za-z][A-Za-z0-9_]*`
    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A signed letter. Whether the symbol is a constant or a variable is decided
/// by the context that owns the word (an equation system's variable list),
/// never by the letter itself.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub symbol: Symbol,
    pub inverse: bool,
}

impl Letter {
    pub fn new(symbol: Symbol, inverse: bool) -> Self {
        Letter { symbol, inverse }
    }

    pub fn pos(name: &str) -> Self {
        Letter::new(Symbol::new(name), false)
    }

    pub fn inv(&self) -> Letter {
        Letter {
            symbol: self.symbol.clone(),
            inverse: !self.inverse,
        }
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.symbol == other.symbol && self.inverse != other.inverse
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.symbol
            .cmp(&other.symbol)
            .then(self.inverse.cmp(&other.inverse))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.symbol)
        } else {
            write!(f, "{}", self.symbol)
        }
    }
}

/// A freely reduced word. Every constructor reduces eagerly, so no value of
/// this type ever contains an adjacent `x x^-1` pair.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce<'a, I>(letters: I) -> Word
where
    I: IntoIterator<Item = &'a Letter>,
{
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        push_reduced(&mut out, l.clone());
    }
    Word { letters: out }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last().is_some_and(|last| last.cancels(&l)) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        let mut out = Vec::with_capacity(letters.len());
        for l in letters {
            push_reduced(&mut out, l);
        }
        Word { letters: out }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn gen(name: &str) -> Self {
        Word::letter(Letter::pos(name))
    }

    pub fn symbol(sym: &Symbol) -> Self {
        Word::letter(Letter::new(sym.clone(), false))
    }

    /// Parses the shared word syntax (`a b^-1 [a,b] (c)^(z) g^3 1`).
    pub fn parse(text: &str) -> Result<Self> {
        crate::parse::parse_word(text)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<&Letter> {
        self.letters.first()
    }

    pub fn last(&self) -> Option<&Letter> {
        self.letters.last()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inv).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut common = 0;
        let n = self.letters.len();
        while common < n.min(other.len())
            && self.letters[n - 1 - common].cancels(&other.letters[common])
        {
            common += 1;
        }
        let mut letters = Vec::with_capacity(n + other.len() - 2 * common);
        letters.extend_from_slice(&self.letters[..n - common]);
        letters.extend_from_slice(&other.letters[common..]);
        Word { letters }
    }

    /// Product of a sequence of words.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for w in words {
            for l in &w.letters {
                push_reduced(&mut out, l.clone());
            }
        }
        Word { letters: out }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out: Vec<Letter> = Vec::new();
        for _ in 0..n.unsigned_abs() {
            for l in &base.letters {
                push_reduced(&mut out, l.clone());
            }
        }
        Word { letters: out }
    }

    /// `v^-1 self v`
    pub fn conjugate(&self, v: &Word) -> Word {
        Word::product([&v.inverse(), self, v])
    }

    /// `u^-1 v^-1 u v`
    pub fn commutator(u: &Word, v: &Word) -> Word {
        Word::product([&u.inverse(), &v.inverse(), u, v])
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word {
            letters: self.letters[start..end].to_vec(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.letters.len() < 2 || !self.letters[0].cancels(&self.letters[self.letters.len() - 1])
    }

    /// Splits `self` as `conjugator^-1 · core · conjugator` with `core`
    /// cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].cancels(&self.letters[n - 1 - k]) {
            k += 1;
        }
        let core = Word {
            letters: self.letters[k..n - k].to_vec(),
        };
        let conjugator = Word {
            letters: self.letters[n - k..].to_vec(),
        };
        (core, conjugator)
    }

    /// Rotation `w[k..] w[..k]` of a cyclically reduced word.
    pub fn rotate(&self, k: usize) -> Word {
        let mut letters = self.letters[k..].to_vec();
        letters.extend_from_slice(&self.letters[..k]);
        Word::from_letters(letters)
    }

    /// For a cyclically reduced word `w`, the shortest `r` with `w = r^n`.
    pub fn primitive_root(&self) -> (Word, usize) {
        let n = self.letters.len();
        for p in 1..=n {
            if n.is_multiple_of(p) && (p..n).all(|i| self.letters[i] == self.letters[i - p]) {
                return (self.subword(0, p), n / p);
            }
        }
        (self.clone(), 1)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.letters.iter().map(|l| l.symbol.clone()).collect()
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.letters.iter().any(|l| &l.symbol == s)
    }

    pub fn occurrences(&self, s: &Symbol) -> usize {
        self.letters.iter().filter(|l| &l.symbol == s).count()
    }

    /// Replaces every symbol for which `f` returns a word; other letters are
    /// kept as they are.
    pub fn substitute<F>(&self, f: F) -> Word
    where
        F: Fn(&Symbol) -> Option<Word>,
    {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            match f(&l.symbol) {
                Some(img) => {
                    if l.inverse {
                        for x in img.letters.iter().rev() {
                            push_reduced(&mut out, x.inv());
                        }
                    } else {
                        for x in &img.letters {
                            push_reduced(&mut out, x.clone());
                        }
                    }
                }
                None => push_reduced(&mut out, l.clone()),
            }
        }
        Word { letters: out }
    }

    pub fn substitute_map(&self, map: &BTreeMap<Symbol, Word>) -> Word {
        self.substitute(|s| map.get(s).cloned())
    }

    /// Image in the abelianization of the free group on the occurring symbols.
    pub fn exponent_sums(&self) -> BTreeMap<Symbol, i64> {
        let mut sums = BTreeMap::new();
        for l in &self.letters {
            *sums.entry(l.symbol.clone()).or_insert(0) += if l.inverse { -1 } else { 1 };
        }
        sums.retain(|_, v| *v != 0);
        sums
    }
}

impl Ord for Word {
    /// Shortlex order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Word::parse(s)
    }
}

pub fn multiply(u: &Word, v: &Word) -> Word {
    u.mul(v)
}

pub fn invert(w: &Word) -> Word {
    w.inverse()
}

pub fn conjugate(u: &Word, v: &Word) -> Word {
    u.conjugate(v)
}

pub fn commutator(u: &Word, v: &Word) -> Word {
    Word::commutator(u, v)
}

pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    w.cyclic_reduce()
}

/// A declared set of symbols that words are checked against.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Alphabet {
    symbols: BTreeSet<Symbol>,
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = Symbol>>(symbols: I) -> Self {
        Alphabet {
            symbols: symbols.into_iter().collect(),
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.symbols.contains(s)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn check(&self, w: &Word) -> Result<()> {
        match w
            .letters()
            .iter()
            .find(|l| !self.symbols.contains(&l.symbol))
        {
            Some(l) => Err(Error::AlphabetMismatch(l.symbol.to_string())),
            None => Ok(()),
        }
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Result<Word> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.mul(v))
    }

    pub fn conjugate(&self, u: &Word, v: &Word) -> Result<Word> {
        self.check(u)?;
        self.check(v)?;
        Ok(u.conjugate(v))
    }

    pub fn commutator(&self, u: &Word, v: &Word) -> Result<Word> {
        self.check(u)?;
        self.check(v)?;
        Ok(Word::commutator(u, v))
    }
}

/// The letters `a, a^-1, b, b^-1, ...` in shortlex order.
pub fn signed_letters(symbols: &[Symbol]) -> Vec<Letter> {
    let mut sorted = symbols.to_vec();
    sorted.sort();
    sorted.dedup();
    sorted
        .into_iter()
        .flat_map(|s| [Letter::new(s.clone(), false), Letter::new(s, true)])
        .collect()
}

/// All reduced words of length at most `radius`, in shortlex order.
pub fn ball(symbols: &[Symbol], radius: usize) -> Vec<Word> {
    let letters = signed_letters(symbols);
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for l in &letters {
                if w.last().is_some_and(|last| last.cancels(l)) {
                    continue;
                }
                let mut letters = w.letters.clone();
                letters.push(l.clone());
                next.push(Word { letters });
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// A uniformly random reduced word of exactly `len` letters.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, symbols: &[Symbol], len: usize) -> Word {
    let letters = signed_letters(symbols);
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    while out.len() < len {
        let l = &letters[rng.gen_range(0..letters.len())];
        if out.last().is_some_and(|last| last.cancels(l)) {
            continue;
        }
        out.push(l.clone());
    }
    Word { letters: out }
}

/// Convenience for building symbol lists in code and tests.
pub fn symbols(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|n| Symbol::new(n)).collect()
}

//! Finitely generated groups of isometries and words in their generators.
//!
//! Group file format:
//!
//! ```text
//! group <name> rank <k>
//! gen <id> re00 im00 re01 im01 re10 im10 re11 im11
//! ```
//!
//! Generator ids are lowercase words; the inverse of `a` is written `A`.

use std::fmt::{self, Write as _};

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::RelaxError;
use crate::format::fmt17;
use crate::graph::io::{parse_err, parse_num};
use crate::isometry::{Isometry, IsometryKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn inv(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

/// A word in the generators; stored as written, not necessarily reduced.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: usize) -> Self {
        Word(vec![Letter { generator: index, inverse: false }])
    }

    pub fn is_identity(&self) -> bool {
        self.reduced().0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// Concatenation `self · other`, freely reduced.
    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v).reduced()
    }

    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Free and cyclic reduction; conjugate words give rotations of each other.
    pub fn cyclically_reduced(&self) -> Word {
        let mut w = self.reduced().0;
        while w.len() >= 2 && w[0] == w[w.len() - 1].inv() {
            w.pop();
            w.remove(0);
        }
        Word(w)
    }

    /// Whether the two words define conjugate elements of the free group.
    pub fn conjugate_in_free_group(&self, other: &Word) -> bool {
        let a = self.cyclically_reduced().0;
        let b = other.cyclically_reduced().0;
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        (0..a.len()).any(|r| a.iter().cycle().skip(r).take(a.len()).eq(b.iter()))
    }

    pub fn evaluate(&self, group: &GroupPresentation) -> Isometry {
        self.0.iter().fold(Isometry::identity(), |acc, l| {
            let g = &group.generators[l.generator];
            acc.compose(if l.inverse { &group.inverses[l.generator] } else { g })
        })
    }

    pub fn display<'a>(&'a self, group: &'a GroupPresentation) -> WordDisplay<'a> {
        WordDisplay { word: self, group }
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    group: &'a GroupPresentation,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.word.0.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            let name = &self.group.names[l.generator];
            if l.inverse {
                f.write_str(&name.to_uppercase())?;
            } else {
                f.write_str(name)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPresentation {
    pub name: String,
    names: Vec<String>,
    generators: Vec<Isometry>,
    inverses: Vec<Isometry>,
}

impl GroupPresentation {
    pub fn new(name: impl Into<String>, gens: Vec<(String, Isometry)>) -> Result<Self, RelaxError> {
        let mut names = Vec::new();
        let mut generators = Vec::new();
        for (n, g) in gens {
            if n.is_empty() || !n.chars().all(|c| c.is_ascii_lowercase()) {
                return Err(RelaxError::Precondition(format!("generator id `{n}` must be lowercase letters")));
            }
            if names.contains(&n) {
                return Err(RelaxError::Precondition(format!("generator `{n}` declared twice")));
            }
            match g.kind() {
                IsometryKind::Identity | IsometryKind::Elliptic => {
                    return Err(RelaxError::Precondition(format!("generator `{n}` is {:?}", g.kind())));
                }
                _ => {}
            }
            names.push(n);
            generators.push(g);
        }
        if generators.is_empty() {
            return Err(RelaxError::Precondition("group needs at least one generator".into()));
        }
        let inverses = generators.iter().map(|g| g.inverse()).collect();
        Ok(GroupPresentation { name: name.into(), names, generators, inverses })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generator(&self, i: usize) -> &Isometry {
        &self.generators[i]
    }

    pub fn generator_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    /// Generators that are parabolic rather than loxodromic.
    pub fn parabolic_generators(&self) -> Vec<usize> {
        (0..self.rank()).filter(|&i| self.generators[i].kind() == IsometryKind::Parabolic).collect()
    }

    /// Conjugates every generator by `h`, i.e. moves the whole picture by `h`.
    pub fn conjugated(&self, h: &Isometry) -> GroupPresentation {
        let hinv = h.inverse();
        let generators: Vec<Isometry> = self.generators.iter().map(|g| h.compose(g).compose(&hinv)).collect();
        let inverses = generators.iter().map(|g| g.inverse()).collect();
        GroupPresentation { name: self.name.clone(), names: self.names.clone(), generators, inverses }
    }

    /// Parses space-separated generator ids (uppercase for inverses); `1`
    /// or an empty string is the identity.
    pub fn parse_word(&self, text: &str) -> Result<Word, RelaxError> {
        let mut letters = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let lower = tok.to_lowercase();
            let generator = self
                .names
                .iter()
                .position(|n| *n == lower)
                .ok_or_else(|| RelaxError::UnknownGenerator(tok.to_string()))?;
            let inverse = tok != lower;
            if inverse && tok != lower.to_uppercase() {
                return Err(RelaxError::UnknownGenerator(tok.to_string()));
            }
            letters.push(Letter { generator, inverse });
        }
        Ok(Word(letters))
    }

    /// Pairwise disjointness of the isometric circles `|cz + d| = 1` of all
    /// generators and inverses. When it holds, each generator maps the
    /// outside of its circle onto the inside of its inverse's circle, so the
    /// group is a classical Schottky group: discrete and free on the
    /// generators. Returns the smallest gap between circles (positive when
    /// certified), or `None` if some generator fixes `∞`.
    pub fn ping_pong_gap(&self) -> Option<f64> {
        let mut circles: Vec<(Complex64, f64)> = Vec::new();
        for g in self.generators.iter().chain(&self.inverses) {
            let m = g.matrix();
            let c = m[(1, 0)];
            if c.norm() < 1e-12 {
                return None;
            }
            circles.push((-m[(1, 1)] / c, 1.0 / c.norm()));
        }
        let mut gap = f64::INFINITY;
        for i in 0..circles.len() {
            for j in i + 1..circles.len() {
                let (ci, ri) = circles[i];
                let (cj, rj) = circles[j];
                gap = gap.min((ci - cj).norm() - ri - rj);
            }
        }
        Some(gap)
    }

    pub fn parse(text: &str) -> Result<Self, RelaxError> {
        let mut header: Option<(String, usize, usize)> = None;
        let mut gens = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks[0] {
                "group" => {
                    if header.is_some() {
                        return Err(parse_err(line, "duplicate group header").into());
                    }
                    if toks.len() != 4 || toks[2] != "rank" {
                        return Err(parse_err(line, "expected `group <name> rank <k>`").into());
                    }
                    header = Some((toks[1].to_string(), parse_num(line, toks[3], "rank")?, line));
                }
                _ if header.is_none() => {
                    return Err(parse_err(line, "expected `group <name> rank <k>` header first").into());
                }
                "gen" => {
                    if toks.len() != 10 {
                        return Err(parse_err(line, "expected `gen <id>` followed by 8 real numbers").into());
                    }
                    let mut v = [0.0; 8];
                    for (slot, tok) in v.iter_mut().zip(&toks[2..]) {
                        *slot = parse_num(line, tok, "matrix entry")?;
                    }
                    let m = Matrix2::new(
                        Complex64::new(v[0], v[1]),
                        Complex64::new(v[2], v[3]),
                        Complex64::new(v[4], v[5]),
                        Complex64::new(v[6], v[7]),
                    );
                    let iso = Isometry::new(m).map_err(|e| parse_err(line, e.to_string()))?;
                    gens.push((toks[1].to_string(), iso, line));
                }
                kw => return Err(parse_err(line, format!("unknown keyword `{kw}`")).into()),
            }
        }
        let (name, rank, hline) = header.ok_or_else(|| parse_err(1, "missing group header"))?;
        if gens.len() != rank {
            return Err(parse_err(hline, format!("header declares rank {rank} but {} generators follow", gens.len())).into());
        }
        for (n, g, line) in &gens {
            if matches!(g.kind(), IsometryKind::Identity | IsometryKind::Elliptic) {
                return Err(parse_err(*line, format!("generator `{n}` is {:?}", g.kind())).into());
            }
        }
        GroupPresentation::new(name, gens.into_iter().map(|(n, g, _)| (n, g)).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("group {} rank {}\n", self.name, self.rank());
        for (n, g) in self.names.iter().zip(&self.generators) {
            let m = g.matrix();
            write!(out, "gen {n}").unwrap();
            for z in [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]] {
                write!(out, " {} {}", fmt17(z.re), fmt17(z.im)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Translation by `tau` (with rotation `twist`) along the geodesic through
/// the origin in direction `x3`, rotated to run along `x1` when `along_x1`,
/// then pushed a distance `offset` along `x2`.
fn displaced_loxodromic(tau: f64, twist: f64, along_x1: bool, offset: f64) -> Isometry {
    let core = Isometry::loxodromic_along_x3(tau, twist);
    let core = if along_x1 {
        let r = rotation_x2(std::f64::consts::FRAC_PI_2);
        r.compose(&core).compose(&r.inverse())
    } else {
        core
    };
    let shift = translation_x2(offset);
    shift.compose(&core).compose(&shift.inverse())
}

fn rotation_x2(theta: f64) -> Isometry {
    let (s, c) = (theta / 2.0).sin_cos();
    Isometry::new(Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(c, 0.0),
    ))
    .unwrap()
}

fn translation_x2(d: f64) -> Isometry {
    let r = Isometry::rotation_x1(-std::f64::consts::FRAC_PI_2);
    r.compose(&Isometry::loxodromic_along_x3(d, 0.0)).compose(&r.inverse())
}

/// Rotation about the origin used to move fixed points away from `∞`.
fn generic_frame() -> Isometry {
    Isometry::rotation_x1(0.37)
        .compose(&rotation_x2(0.61))
        .compose(&Isometry::loxodromic_along_x3(0.0, 0.23))
}

/// Two loxodromics with perpendicular axes at distance `gap`, moved into a
/// generic position. The builders for the shipped group files.
pub fn schottky_pair(name: &str, tau: [f64; 2], twist: [f64; 2], gap: f64) -> Result<GroupPresentation, RelaxError> {
    let a = displaced_loxodromic(tau[0], twist[0], false, -gap / 2.0);
    let b = displaced_loxodromic(tau[1], twist[1], true, gap / 2.0);
    let frame = generic_frame();
    GroupPresentation::new(name, vec![("a".into(), a), ("b".into(), b)]).map(|g| g.conjugated(&frame))
}

/// Rank-3 variant: a third loxodromic along `x2`, displaced along `x1`.
pub fn schottky_triple(name: &str, tau: [f64; 3], gap: f64) -> Result<GroupPresentation, RelaxError> {
    let a = displaced_loxodromic(tau[0], 0.2, false, -gap / 2.0);
    let b = displaced_loxodromic(tau[1], -0.3, true, gap / 2.0);
    // x2 axis pushed along x3: conjugate a core translation
    let r = Isometry::rotation_x1(-std::f64::consts::FRAC_PI_2);
    let core = r.compose(&Isometry::loxodromic_along_x3(tau[2], 0.1)).compose(&r.inverse());
    let push = rotation_x2(std::f64::consts::FRAC_PI_2).compose(&translation_x2(gap)).compose(&rotation_x2(-std::f64::consts::FRAC_PI_2));
    let c = push.compose(&core).compose(&push.inverse());
    let frame = generic_frame();
    GroupPresentation::new(name, vec![("a".into(), a), ("b".into(), b), ("c".into(), c)]).map(|g| g.conjugated(&frame))
}

/// The example groups shipped in `data/groups`, by file stem.
pub fn shipped_groups() -> Vec<GroupPresentation> {
    vec![
        schottky_pair("schottky2a", [3.0, 3.0], [0.3, -0.2], 1.0).unwrap(),
        schottky_pair("schottky2b", [3.0, 3.0], [0.5, 0.4], 2.0).unwrap(),
        schottky_triple("schottky3", [4.5, 4.5, 4.5], 2.0).unwrap(),
    ]
}

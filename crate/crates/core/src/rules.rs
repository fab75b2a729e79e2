//! Quadrature rule data model, text format and the bundled catalog.
//!
//! Orbit format:
//!
//! ```text
//! # optional comment lines
//! <element> <strength> <n_points> <n_orbits>
//! <family_id> <params...> <weight>        (one line per orbit)
//! ```
//!
//! Expanded format:
//!
//! ```text
//! <element> <strength> <n_points> expanded
//! <x1> <x2> <x3> <x4> <w>                 (one line per point)
//! ```
//!
//! Numbers are written with 34 significant digits and parsed into
//! double-double, so a write/read cycle is lossless at that precision.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::elements::{contains, volume_real, ElementKind, Point4, ReferenceFrame};
use crate::error::{Error, Result};
use crate::real::{Dd, Real};
use crate::symmetry::{family, OrbitInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Bundled,
    Generated,
    Duffy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitWeight {
    pub orbit: OrbitInstance<Dd>,
    pub weight: Dd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: ElementKind,
    pub strength: usize,
    /// Empty for rules known only by their points (e.g. Duffy rules).
    pub orbits: Vec<OrbitWeight>,
    pub provenance: Provenance,
    points: Vec<Point4<Dd>>,
    weights: Vec<Dd>,
}

pub const DIGITS: usize = 34;

impl QuadratureRule {
    /// Builds a rule from orbits; parameters must lie in their boxes.
    pub fn from_orbits(
        kind: ElementKind,
        strength: usize,
        orbits: Vec<OrbitWeight>,
        provenance: Provenance,
    ) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for o in &orbits {
            if o.orbit.family.kind != kind {
                return Err(Error::Validation(format!("{} orbit in a {kind} rule", o.orbit.family.kind)));
            }
            let pts = o.orbit.expand()?;
            if pts.len() != o.orbit.family.cardinality {
                return Err(Error::Validation(format!(
                    "S{} orbit with parameters {:?} has {} distinct points, expected {}",
                    o.orbit.family.family_id,
                    o.orbit.params.iter().map(|p| p.to_f64()).collect::<Vec<_>>(),
                    pts.len(),
                    o.orbit.family.cardinality
                )));
            }
            weights.extend(std::iter::repeat_n(o.weight, pts.len()));
            points.extend(pts);
        }
        Ok(QuadratureRule { kind, strength, orbits, provenance, points, weights })
    }

    pub fn from_points(
        kind: ElementKind,
        strength: usize,
        points: Vec<Point4<Dd>>,
        weights: Vec<Dd>,
        provenance: Provenance,
    ) -> Self {
        assert_eq!(points.len(), weights.len());
        QuadratureRule { kind, strength, orbits: Vec::new(), provenance, points, weights }
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point4<Dd>] {
        &self.points
    }

    pub fn weights(&self) -> &[Dd] {
        &self.weights
    }

    /// Points and weights converted to the working precision `T`.
    pub fn nodes<T: Real>(&self) -> (Vec<Point4<T>>, Vec<T>) {
        (self.points.iter().map(|p| p.map(T::from_dd)).collect(), self.weights.iter().map(|&w| T::from_dd(w)).collect())
    }

    pub fn integrate<T: Real>(&self, f: impl Fn(&Point4<T>) -> T) -> T {
        let (p, w) = self.nodes::<T>();
        p.iter().zip(&w).map(|(x, &wi)| wi * f(x)).sum()
    }

    pub fn weight_sum(&self) -> Dd {
        self.weights.iter().copied().sum()
    }

    /// Checks positive weights, total weight equal to the reference volume
    /// (within `1e-12`) and containment of every point (within `1e-12`).
    pub fn validate(&self) -> Result<()> {
        if let Some(w) = self.weights.iter().find(|w| !(w.to_f64() > 0.0)) {
            return Err(Error::Validation(format!("non-positive weight {w}")));
        }
        let vol: Dd = volume_real(ReferenceFrame::reference(self.kind));
        let sum = self.weight_sum();
        if (sum - vol).abs().to_f64() > 1e-12 * vol.to_f64() {
            return Err(Error::Validation(format!("weights sum to {sum}, expected {vol}")));
        }
        if let Some(p) =
            self.points.iter().find(|p| !contains(ReferenceFrame::reference(self.kind), &p.map(Dd::to_f64), 1e-12))
        {
            return Err(Error::Validation(format!("point {:?} lies outside the {}", p.map(Dd::to_f64), self.kind)));
        }
        if !self.orbits.is_empty() {
            let expected: usize = self.orbits.iter().map(|o| o.orbit.family.cardinality).sum();
            if expected != self.points.len() {
                return Err(Error::Validation(format!("{} points, orbits imply {expected}", self.points.len())));
            }
        }
        Ok(())
    }

    /// Conventional file name `<strength>-<npoints>.txt`.
    pub fn file_name(&self) -> String {
        format!("{}-{}.txt", self.strength, self.n_points())
    }
}

fn fmt_num(x: Dd) -> String {
    x.to_sci_string(DIGITS)
}

/// Orbit format; falls back to the expanded format for rules without orbits.
pub fn format_rule(rule: &QuadratureRule) -> String {
    if rule.orbits.is_empty() {
        return format_expanded(rule);
    }
    let mut s = format!("{} {} {} {}\n", rule.kind, rule.strength, rule.n_points(), rule.orbits.len());
    for o in &rule.orbits {
        let _ = write!(s, "{}", o.orbit.family.family_id);
        for &p in &o.orbit.params {
            let _ = write!(s, " {}", fmt_num(p));
        }
        let _ = writeln!(s, " {}", fmt_num(o.weight));
    }
    s
}

pub fn format_expanded(rule: &QuadratureRule) -> String {
    let mut s = format!("{} {} {} expanded\n", rule.kind, rule.strength, rule.n_points());
    for (p, &w) in rule.points.iter().zip(&rule.weights) {
        let _ = writeln!(s, "{} {} {} {} {}", fmt_num(p[0]), fmt_num(p[1]), fmt_num(p[2]), fmt_num(p[3]), fmt_num(w));
    }
    s
}

pub fn write_rule(rule: &QuadratureRule, mut dest: impl Write) -> Result<()> {
    dest.write_all(format_rule(rule).as_bytes())?;
    Ok(())
}

pub fn write_rule_file(rule: &QuadratureRule, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    write_rule(rule, std::fs::File::create(path)?)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<Dd> {
    Dd::from_str(tok).map_err(|e| parse_err(line, e.to_string()))
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

/// Parses either format and validates the result.
pub fn read_rule(src: &str) -> Result<QuadratureRule> {
    read_rule_with(src, Provenance::Bundled)
}

pub fn read_rule_with(src: &str, provenance: Provenance) -> Result<QuadratureRule> {
    let mut lines =
        src.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(0, "empty rule file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 {
        return Err(parse_err(hl, "header must be `element strength n_points n_orbits|expanded`"));
    }
    let kind = ElementKind::from_str(h[0]).map_err(|e| parse_err(hl, e.to_string()))?;
    let strength = parse_usize(h[1], hl, "strength")?;
    let n_points = parse_usize(h[2], hl, "point count")?;
    let rule = if h[3] == "expanded" {
        let mut pts = Vec::with_capacity(n_points);
        let mut wts = Vec::with_capacity(n_points);
        for (ln, l) in lines {
            let v: Vec<Dd> = l.split_whitespace().map(|t| parse_num(t, ln)).collect::<Result<_>>()?;
            if v.len() != 5 {
                return Err(parse_err(ln, format!("expected 5 numbers, found {}", v.len())));
            }
            pts.push([v[0], v[1], v[2], v[3]]);
            wts.push(v[4]);
        }
        QuadratureRule::from_points(kind, strength, pts, wts, provenance)
    } else {
        let n_orbits = parse_usize(h[3], hl, "orbit count")?;
        let mut orbits = Vec::with_capacity(n_orbits);
        for (ln, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let fid = parse_usize(toks[0], ln, "family id")?;
            let fam = family(kind, fid).map_err(|e| parse_err(ln, e.to_string()))?;
            if toks.len() != fam.n_params + 2 {
                return Err(parse_err(ln, format!("S{fid} needs {} parameters and a weight", fam.n_params)));
            }
            let nums: Vec<Dd> = toks[1..].iter().map(|t| parse_num(t, ln)).collect::<Result<_>>()?;
            let (params, weight) = nums.split_at(fam.n_params);
            let orbit = OrbitInstance::new(fam, params.to_vec()).map_err(|e| parse_err(ln, e.to_string()))?;
            orbits.push(OrbitWeight { orbit, weight: weight[0] });
        }
        if orbits.len() != n_orbits {
            return Err(parse_err(hl, format!("header promises {n_orbits} orbits, found {}", orbits.len())));
        }
        QuadratureRule::from_orbits(kind, strength, orbits, provenance).map_err(|e| match e {
            Error::Domain(m) => Error::Validation(m),
            other => other,
        })?
    };
    if rule.n_points() != n_points {
        return Err(Error::Validation(format!("header promises {n_points} points, found {}", rule.n_points())));
    }
    rule.validate()?;
    Ok(rule)
}

pub fn read_rule_file(path: &Path) -> Result<QuadratureRule> {
    read_rule(&std::fs::read_to_string(path)?)
}

/// Point counts of the best known rules by strength (strengths 2 to 16).
pub fn reference_point_count(kind: ElementKind, strength: usize) -> Option<usize> {
    const TESSERACT: [usize; 15] = [16, 16, 24, 24, 57, 57, 160, 160, 272, 272, 512, 512, 728, 728, 1384];
    const PENTATOPE: [usize; 15] = [5, 15, 20, 30, 56, 70, 105, 151, 210, 281, 445, 555, 725, 905, 1055];
    const TET_PRISM: [usize; 13] = [6, 12, 20, 27, 61, 72, 114, 159, 259, 322, 468, 608, 921];
    let table: &[usize] = match kind {
        ElementKind::Tesseract => &TESSERACT,
        ElementKind::Pentatope => &PENTATOPE,
        ElementKind::TetPrism => &TET_PRISM,
    };
    strength.checked_sub(2).and_then(|i| table.get(i)).copied()
}

macro_rules! bundled {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../../../rules/", $path)))),*]
    };
}

/// Rule files shipped inside the library.
pub const BUNDLED_FILES: &[(&str, &str)] = bundled![
    "pentatope/2-5.txt",
    "pentatope/3-15.txt",
    "pentatope/6-56.txt",
    "pentatope/8-105.txt",
    "pentatope/9-151.txt",
    "tesseract/3-16.txt",
    "tesseract/6-57.txt",
    "tesseract/8-160.txt",
    "tetprism/2-6.txt",
    "tetprism/6-61.txt",
];

/// Immutable collection of rules keyed by element and strength.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    rules: Vec<QuadratureRule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub kind: ElementKind,
    pub strength: usize,
    pub n_points: usize,
    pub reference_points: Option<usize>,
    pub provenance: Provenance,
}

impl Catalog {
    pub fn new(mut rules: Vec<QuadratureRule>) -> Self {
        rules.sort_by_key(|r| (r.kind, r.strength, r.n_points()));
        Catalog { rules }
    }

    /// Loads every `<element>/<strength>-<npoints>.txt` below `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut rules = Vec::new();
        for kind in ElementKind::ALL {
            let sub = dir.join(kind.name());
            let Ok(entries) = std::fs::read_dir(&sub) else {
                continue;
            };
            let mut paths: Vec<_> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
            paths.sort();
            for p in paths.into_iter().filter(|p| p.extension().is_some_and(|e| e == "txt")) {
                let rule = read_rule_file(&p).map_err(|e| Error::Validation(format!("{}: {e}", p.display())))?;
                rules.push(rule);
            }
        }
        Ok(Catalog::new(rules))
    }

    pub fn rules(&self) -> &[QuadratureRule] {
        &self.rules
    }

    /// Smallest rule of exactly this strength.
    pub fn get(&self, kind: ElementKind, strength: usize) -> Option<&QuadratureRule> {
        self.rules.iter().find(|r| r.kind == kind && r.strength == strength)
    }

    /// Smallest rule of at least this strength.
    pub fn at_least(&self, kind: ElementKind, strength: usize) -> Option<&QuadratureRule> {
        self.rules
            .iter()
            .filter(|r| r.kind == kind && r.strength >= strength)
            .min_by_key(|r| (r.n_points(), r.strength))
    }

    pub fn entries(&self) -> Vec<CatalogEntry> {
        self.rules
            .iter()
            .map(|r| CatalogEntry {
                kind: r.kind,
                strength: r.strength,
                n_points: r.n_points(),
                reference_points: reference_point_count(r.kind, r.strength),
                provenance: r.provenance,
            })
            .collect()
    }
}

/// The rules compiled into the library.
pub fn bundled_rules() -> Catalog {
    static CATALOG: std::sync::OnceLock<Catalog> = std::sync::OnceLock::new();
    CATALOG
        .get_or_init(|| {
            Catalog::new(
                BUNDLED_FILES
                    .iter()
                    .map(|(name, src)| read_rule(src).unwrap_or_else(|e| panic!("bundled rule {name}: {e}")))
                    .collect(),
            )
        })
        .clone()
}

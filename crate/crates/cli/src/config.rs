//! Run configuration: JSON layout, schema validation, and conversion
//! into the engine's exact types.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;

use dtwall::lattice::{ClassVector, CurveClass, LatticeConfig, MRule, Window};
use dtwall::stability::{ChargePath, GaussRational, XiCharge};
use dtwall::toycat::{MatFp, Quiver, QuiverRep, WeakStabilityFn};
use dtwall::wallcross::{InvariantTable, Mode};
use dtwall::Error;

/// The schema every configuration file is validated against before any
/// computation; shipped with the binary and in the repository.
pub const CONFIG_SCHEMA: &str = include_str!("../schema/config.schema.json");

pub type Rational2 = [i64; 2];
pub type Gauss2 = [Rational2; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: Option<LatticeSection>,
    pub window: Option<WindowSection>,
    pub mode: Option<String>,
    pub budget: Option<BudgetSection>,
    pub path: Option<Vec<ChargeSection>>,
    pub wall_classes: Option<Vec<Vec<i64>>>,
    pub table: Option<TableSection>,
    pub n_table: Option<Vec<Vec<i64>>>,
    pub pt_series: Option<Vec<Vec<i64>>>,
    pub series: Option<SeriesSection>,
    pub macmahon: Option<MacmahonSection>,
    pub nhat: Option<NhatSection>,
    pub coeffs: Option<CoeffsSection>,
    pub identities: Option<IdentitiesSection>,
    pub transform: Option<TransformSection>,
    pub hn: Option<HnSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub curve_rank: usize,
    pub chi: i64,
    pub m: MSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MSection {
    pub affine: Option<i64>,
    pub table: Option<Vec<(Vec<i64>, i64)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    pub k_cut: i64,
    pub beta_cut: Vec<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub max_parts: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeSection {
    pub z0: Gauss2,
    pub omega: Vec<Rational2>,
    pub z1: Gauss2,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    pub mode: String,
    pub entries: Vec<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSection {
    pub support: String,
    pub entries: Vec<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacmahonSection {
    pub sign: Option<i64>,
    pub chi: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NhatSection {
    pub chi: Option<i64>,
    pub n_max: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffsSection {
    pub l_max: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesSection {
    pub surjection_l_max: Option<usize>,
    pub collapse_l_max: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    pub target: Vec<i64>,
    pub oracle: Option<serde_json::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HnSection {
    pub p: u8,
    pub quiver: QuiverSection,
    pub stability: StabilitySection,
    pub reps: Option<Vec<RepSection>>,
    pub dim_bound: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSection {
    pub vertices: usize,
    pub arrows: Vec<(usize, usize)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub directions: Vec<Gauss2>,
    pub levels: Option<Vec<u8>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSection {
    pub dims: Vec<usize>,
    pub maps: Vec<Vec<i64>>,
}

/// Parses and schema-validates a configuration document.
pub fn load(raw: &str) -> Result<RunConfig, Error> {
    let value: serde_json::Value = serde_json::from_str(raw)
        .map_err(|e| Error::Config(format!("config is not valid JSON: {}", e)))?;
    let schema: serde_json::Value =
        serde_json::from_str(CONFIG_SCHEMA).expect("embedded schema parses");
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("embedded schema compiles");
    if let Err(errors) = compiled.validate(&value) {
        let detail: Vec<String> = errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        return Err(Error::Config(format!(
            "config fails schema validation: {}",
            detail.join("; ")
        )));
    }
    serde_json::from_value(value)
        .map_err(|e| Error::Config(format!("config does not deserialize: {}", e)))
}

pub fn rational(r: &Rational2) -> Result<BigRational, Error> {
    if r[1] == 0 {
        return Err(Error::Config("rational with zero denominator".into()));
    }
    Ok(BigRational::new(BigInt::from(r[0]), BigInt::from(r[1])))
}

pub fn gauss(g: &Gauss2) -> Result<GaussRational, Error> {
    Ok(GaussRational::new(rational(&g[0])?, rational(&g[1])?))
}

pub fn charge(c: &ChargeSection) -> Result<XiCharge, Error> {
    XiCharge::new(
        gauss(&c.z0)?,
        c.omega.iter().map(rational).collect::<Result<_, _>>()?,
        gauss(&c.z1)?,
    )
}

pub fn charge_path(sections: &[ChargeSection]) -> Result<ChargePath, Error> {
    ChargePath::new(sections.iter().map(charge).collect::<Result<Vec<_>, _>>()?)
}

pub fn lattice(section: &LatticeSection) -> Result<LatticeConfig, Error> {
    let m_rule = match (&section.m.affine, &section.m.table) {
        (Some(slope), None) => MRule::Affine { slope: *slope },
        (None, Some(entries)) => MRule::Table(entries.clone()),
        _ => {
            return Err(Error::Config(
                "the m rule must be exactly one of affine or table".into(),
            ))
        }
    };
    LatticeConfig::new(section.curve_rank, section.chi, m_rule)
}

pub fn window(cfg: &LatticeConfig, section: &WindowSection) -> Result<Window, Error> {
    Window::new(cfg, section.k_cut, CurveClass(section.beta_cut.clone()))
}

pub fn mode(name: Option<&str>) -> Result<Mode, Error> {
    match name.unwrap_or("euler") {
        "euler" => Ok(Mode::Euler),
        "behrend" => Ok(Mode::Behrend),
        other => Err(Error::Config(format!("unknown mode {:?}", other))),
    }
}

/// `[s, beta_1, ..., beta_k, r]`.
pub fn flat_class(entry: &[i64], curve_rank: usize) -> Result<ClassVector, Error> {
    if entry.len() != curve_rank + 2 {
        return Err(Error::Config(format!(
            "class entry has {} fields, expected {}",
            entry.len(),
            curve_rank + 2
        )));
    }
    Ok(ClassVector::from_parts(
        entry[0],
        &entry[1..=curve_rank],
        entry[curve_rank + 1],
    ))
}

/// `[n, beta_1, ..., beta_k, num, den]`.
pub fn indexed_value(
    entry: &[i64],
    curve_rank: usize,
) -> Result<(i64, CurveClass, BigRational), Error> {
    if entry.len() != curve_rank + 3 {
        return Err(Error::Config(format!(
            "indexed value has {} fields, expected {}",
            entry.len(),
            curve_rank + 3
        )));
    }
    let beta = CurveClass(entry[1..=curve_rank].to_vec());
    let value = rational(&[entry[curve_rank + 1], entry[curve_rank + 2]])?;
    Ok((entry[0], beta, value))
}

pub fn invariant_table(section: &TableSection, curve_rank: usize) -> Result<InvariantTable, Error> {
    let mode = mode(Some(&section.mode))?;
    let mut table = InvariantTable::new(mode);
    for entry in &section.entries {
        if entry.len() != curve_rank + 4 {
            return Err(Error::Config(format!(
                "table entry has {} fields, expected {}",
                entry.len(),
                curve_rank + 4
            )));
        }
        let class = flat_class(&entry[..curve_rank + 2], curve_rank)?;
        let value = rational(&[entry[curve_rank + 2], entry[curve_rank + 3]])?;
        table.set(class, value)?;
    }
    Ok(table)
}

pub fn n_table(
    entries: &[Vec<i64>],
    curve_rank: usize,
) -> Result<BTreeMap<(i64, CurveClass), BigRational>, Error> {
    let mut out = BTreeMap::new();
    for entry in entries {
        let (n, beta, value) = indexed_value(entry, curve_rank)?;
        out.insert((n, beta), value);
    }
    Ok(out)
}

pub fn quiver_rep(quiver: &Quiver, p: u8, section: &RepSection) -> Result<QuiverRep, Error> {
    if section.dims.len() != quiver.vertex_count {
        return Err(Error::Config(
            "representation dims do not match the quiver".into(),
        ));
    }
    let mut maps = Vec::new();
    for (flat, &(s, t)) in section.maps.iter().zip(&quiver.arrows) {
        let rows = section.dims[t];
        let cols = section.dims[s];
        if flat.len() != rows * cols {
            return Err(Error::Config(format!(
                "matrix for arrow ({}, {}) has {} entries, expected {}",
                s,
                t,
                flat.len(),
                rows * cols
            )));
        }
        let mut m = MatFp::zero(p, rows, cols);
        for (i, v) in flat.iter().enumerate() {
            m.data[i] = (v.rem_euclid(p as i64)) as u8;
        }
        maps.push(m);
    }
    QuiverRep::new(quiver.clone(), p, section.dims.clone(), maps)
}

pub fn stability_fn(section: &StabilitySection) -> Result<WeakStabilityFn, Error> {
    let directions = section
        .directions
        .iter()
        .map(gauss)
        .collect::<Result<Vec<_>, _>>()?;
    match &section.levels {
        Some(levels) => WeakStabilityFn::new(directions, levels.clone()),
        None => WeakStabilityFn::graded(directions),
    }
}

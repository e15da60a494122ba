use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::abelian::{subgroup, GroupElem, GroupHom};
use crate::error::{Error, Result};
use crate::ramification::{match_galois, transfer_extension, Q};
use crate::tori::{Stage, TorusPointsQuotient};
use crate::units::{unit_inclusion, DeligneIso};

use super::datum::{ClosePairDatum, LevelPair};
use super::report::{check_all, sample, sample_label, CheckLine, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoKind {
    Standard,
    Congruent,
}

impl fmt::Display for IsoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoKind::Standard => write!(f, "standard"),
            IsoKind::Congruent => write!(f, "congruent"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TransferIso {
    pub kind: IsoKind,
    pub pair: Arc<LevelPair>,
    pub map: GroupHom,
    /// Checks made at the unramified stage (congruent isomorphisms only).
    pub stage: Option<Report>,
}

impl TransferIso {
    pub fn r(&self) -> Q {
        self.pair.r
    }

    pub fn source(&self) -> &Arc<TorusPointsQuotient> {
        &self.pair.left
    }

    pub fn target(&self) -> &Arc<TorusPointsQuotient> {
        &self.pair.right
    }

    pub fn apply(&self, x: &[BigInt]) -> GroupElem {
        self.map.apply(x)
    }

    /// Every sampled element goes to a standard correspondent.
    pub fn check_correspondence(&self, cap: usize) -> CheckLine {
        let (xs, all) = sample(self.source().group(), cap);
        check_all(sample_label("every element maps to a standard correspondent", all), &xs, |x| {
            let y = self.apply(x);
            (!self.pair.correspond(x, &y)).then(|| format!("{} -> {}", self.pair.format_left(x), self.pair.format_right(&y)))
        })
    }
}

/// Either the isomorphism or a witness that the split-level map does not restrict onto.
#[derive(Clone, Debug)]
pub enum IsoOutcome {
    Built(TransferIso),
    NotOnto { witness: String },
}

impl IsoOutcome {
    pub fn built(self) -> Result<TransferIso> {
        match self {
            IsoOutcome::Built(t) => Ok(t),
            IsoOutcome::NotOnto { witness } => Err(Error::TransferFailed(format!("no standard isomorphism: {witness}"))),
        }
    }

    pub fn is_built(&self) -> bool {
        matches!(self, IsoOutcome::Built(_))
    }
}

pub fn build_standard_iso(datum: &ClosePairDatum, r: Q) -> Result<IsoOutcome> {
    let pair = Arc::new(datum.pair(r)?);
    standard_from_pair(&pair)
}

pub(crate) fn standard_from_pair(pair: &Arc<LevelPair>) -> Result<IsoOutcome> {
    let (left, right) = (&pair.left, &pair.right);
    let mut images = vec![];
    for i in 0..left.group().ngens() {
        let x = left.group().generator(i);
        match pair.image_in_right(&x) {
            Some(y) => images.push(y),
            None => {
                return Ok(IsoOutcome::NotOnto {
                    witness: format!("{} has no correspondent among the points of {}", left.format(&x), right.spec.name),
                })
            }
        }
    }
    let map = GroupHom::from_images(left.group().clone(), right.group().clone(), &images)?;
    if !map.is_surjective() {
        let img = map.image_inclusion();
        let g = right.group();
        let y = (0..g.ngens()).map(|j| g.generator(j)).find(|y| !subgroup::contains_elem(&img, y)).unwrap_or_else(|| g.zero());
        return Ok(IsoOutcome::NotOnto { witness: format!("{} is not the correspondent of a point of {}", right.format(&y), left.spec.name) });
    }
    if !map.is_injective() {
        return Err(Error::TransferFailed("split-level map is not injective on points".into()));
    }
    Ok(IsoOutcome::Built(TransferIso { kind: IsoKind::Standard, pair: pair.clone(), map, stage: None }))
}

/// The standard isomorphism at integer level m, certified at an unramified stage of degree f*.
pub fn build_congruent_iso(datum: &ClosePairDatum, m: usize, stage_degree: Option<usize>, cap: usize) -> Result<IsoOutcome> {
    if !datum.left.is_weakly_induced() {
        return Err(Error::NotWeaklyInduced);
    }
    if m == 0 {
        return Err(Error::InvalidParameter("congruent level must be positive".into()));
    }
    let r = Q::from_integer(m as i64);
    datum.check_level(r)?;
    let iso = match build_standard_iso(datum, r)? {
        IsoOutcome::Built(t) => t,
        other => return Ok(other),
    };
    let degree = stage_degree.unwrap_or_else(|| datum.left.default_stage_degree());
    let stage = stage_report(&iso, degree, cap)?;
    if let Some(line) = stage.first_failure() {
        return Err(Error::TransferFailed(format!("stage check failed: {line}")));
    }
    Ok(IsoOutcome::Built(TransferIso { kind: IsoKind::Congruent, stage: Some(stage), ..iso }))
}

/// Both sides at the unramified stage of degree f*, with the stage Deligne map on split points.
pub struct StagePair {
    pub left: TorusPointsQuotient,
    pub right: TorusPointsQuotient,
    pub perm: Vec<usize>,
    pub split_map: GroupHom,
}

impl StagePair {
    pub fn new(datum: &ClosePairDatum, r: Q, degree: usize) -> Result<Self> {
        let tr = &datum.transfer;
        let name = format!("{}~", datum.left.splitting.name);
        let ls = Arc::new(Stage::build(&datum.left, degree, &name)?);
        let (rs, cert, perm) = if ls.extended {
            let te = transfer_extension(&tr.split_cert, &ls.tower, &format!("{name}'"))?;
            let rs = Stage::with_tower(&datum.right, degree, &te.right)?;
            let perm = match_galois(&te.cert, &ls.galois, &rs.galois)?;
            (rs, te.cert, perm)
        } else {
            (Stage::with_tower(&datum.right, degree, &datum.right.splitting)?, tr.split_cert.clone(), tr.perm.clone())
        };
        let rs = Arc::new(rs);
        let left = TorusPointsQuotient::at_stage(&datum.left, &ls, r)?;
        let right = TorusPointsQuotient::at_stage(&datum.right, &rs, r)?;
        let d = DeligneIso::new(&cert, &left.split.units, &right.split.units)?;
        let split_map = left.split.componentwise(&right.split, &d.hom)?;
        Ok(StagePair { left, right, perm, split_map })
    }

    /// Q(F) -> Q(F~) through L -> L~.
    pub fn embedding(q: &TorusPointsQuotient, staged: &TorusPointsQuotient) -> Result<GroupHom> {
        let inc = unit_inclusion(&q.split.units, &staged.split.units)?;
        q.split.componentwise(&staged.split, &inc)?.restrict(&q.inclusion, &staged.inclusion)
    }
}

pub(crate) fn stage_report(iso: &TransferIso, degree: usize, cap: usize) -> Result<Report> {
    let pair = &iso.pair;
    let st = StagePair::new(&pair.datum, pair.r, degree)?;
    let mut rep = Report::new(format!("unramified stage of degree {degree}"));
    let staged = st.split_map.restrict(&st.left.inclusion, &st.right.inclusion);
    match &staged {
        Ok(h) if h.is_isomorphism() => rep.push(CheckLine::pass("stage transfer is an isomorphism of stage points", st.left.group().ngens())),
        Ok(_) => rep.push(CheckLine::fail("stage transfer is an isomorphism of stage points", st.left.group().ngens(), "not bijective")),
        Err(e) => rep.push(CheckLine::from_error("stage transfer is an isomorphism of stage points", e)),
    }
    let (xs, all) = sample(st.left.group(), cap);
    let ambient: Vec<GroupElem> = xs.iter().map(|x| st.left.to_ambient(x)).collect();
    let g = &st.left.split.galois;
    let line = check_all(sample_label("stage transfer commutes with the Galois action", all), &ambient, |a| {
        (0..g.order()).find_map(|s| {
            let lhs = st.split_map.apply(&st.left.split.actions[s].apply(a));
            let rhs = st.right.split.actions[st.perm[s]].apply(&st.split_map.apply(a));
            (lhs != rhs).then(|| format!("{} at {}", st.left.split.tuple(a).iter().map(|u| u.to_string()).collect::<Vec<_>>().join(" "), g.name_of(s)))
        })
    });
    rep.push(line);
    let (emb_l, emb_r) = (StagePair::embedding(&pair.left, &st.left)?, StagePair::embedding(&pair.right, &st.right)?);
    let (xs, all) = sample(pair.left.group(), cap);
    rep.push(check_all(sample_label("stage transfer restricts to the base isomorphism", all), &xs, |x| {
        let lhs = emb_r.apply(&iso.apply(x));
        let rhs = st.right.inclusion.preimage(&st.split_map.apply(&st.left.to_ambient(&emb_l.apply(x))));
        (Some(lhs) != rhs).then(|| pair.left.format(x))
    }));
    Ok(rep)
}

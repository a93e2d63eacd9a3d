//! JSON file formats. Field elements are written as base-p integer
//! encodings, so a file is meaningful together with its `modulus`.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::SpaceSpec;
use crate::gf::{Elem, FieldCtx};
use crate::klein::{Census, Spread};
use crate::pointset::PointSet;
use crate::polarspace::PolarSpace;
use crate::projgeom::{ProjPoint, Subspace};

/// A list of points of PG(n,q). Ovoid files also carry `space` and `claimed_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub q: u32,
    pub p: u32,
    pub h: u32,
    pub modulus: Vec<u32>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_m: Option<usize>,
    pub points: Vec<Vec<Elem>>,
}

impl PointSetFile {
    pub fn from_points(f: &FieldCtx, n: usize, points: &[ProjPoint]) -> Self {
        PointSetFile {
            q: f.q(),
            p: f.p(),
            h: f.h(),
            modulus: f.modulus().to_vec(),
            n,
            space: None,
            claimed_m: None,
            points: points.iter().map(|p| p.coords().to_vec()).collect(),
        }
    }

    /// Points of `set` in index order, tagged with the space and `m`.
    pub fn for_ovoid(space: &PolarSpace, set: &PointSet, claimed_m: Option<usize>) -> Self {
        let pts: Vec<ProjPoint> = set.iter().map(|i| space.point(i).clone()).collect();
        PointSetFile {
            space: Some(space.spec()),
            claimed_m,
            ..Self::from_points(space.field(), space.ambient_dim(), &pts)
        }
    }

    /// The field described by the header.
    pub fn field(&self) -> Result<FieldCtx> {
        let f = FieldCtx::with_modulus(self.p, &self.modulus)?;
        if f.q() != self.q || f.h() != self.h {
            return Err(Error::Parse(format!("header q = {} does not match p = {}, modulus degree {}", self.q, self.p, f.h())));
        }
        Ok(f)
    }

    pub fn projective_points(&self) -> Result<Vec<ProjPoint>> {
        let f = self.field()?;
        self.points
            .iter()
            .map(|c| {
                if c.len() != self.n + 1 {
                    return Err(Error::DimensionMismatch { expected: self.n + 1, got: c.len() });
                }
                ProjPoint::new(&f, c)
            })
            .collect()
    }

    /// The points as a set over `space`. The encoding must match the space's
    /// field modulus; every point must lie on the space.
    pub fn to_pointset(&self, space: &PolarSpace) -> Result<PointSet> {
        if self.modulus != space.field().modulus() || self.q != space.field().q() {
            return Err(Error::Parse("file field differs from the space's field".into()));
        }
        if self.n != space.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: space.ambient_dim(), got: self.n });
        }
        let mut set = PointSet::empty(space.num_points());
        for p in self.projective_points()? {
            set.insert(space.index_of(&p).ok_or(Error::PointNotInSpace)?);
        }
        Ok(set)
    }
}

/// Rows of the canonical basis.
pub fn subspace_rows(a: &Subspace) -> Vec<Vec<Elem>> {
    a.basis().to_vec()
}

/// A line spread of PG(3,q); each line is given by its two canonical basis points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpreadFile {
    pub q: u32,
    pub p: u32,
    pub h: u32,
    pub modulus: Vec<u32>,
    pub method: String,
    pub lines: Vec<[Vec<Elem>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub census: Option<CensusBlock>,
}

/// Census of a spread against the elliptic quadric with the given Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusBlock {
    pub form_gram: Vec<Vec<Elem>>,
    #[serde(flatten)]
    pub counts: Census,
}

impl SpreadFile {
    pub fn new(f: &FieldCtx, method: &str, spread: &Spread, census: Option<CensusBlock>) -> Self {
        SpreadFile {
            q: f.q(),
            p: f.p(),
            h: f.h(),
            modulus: f.modulus().to_vec(),
            method: method.to_string(),
            lines: spread.lines().iter().map(|l| [l.basis()[0].clone(), l.basis()[1].clone()]).collect(),
            census,
        }
    }

    pub fn field(&self) -> Result<FieldCtx> {
        let f = FieldCtx::with_modulus(self.p, &self.modulus)?;
        if f.q() != self.q {
            return Err(Error::Parse(format!("header q = {} does not match the modulus", self.q)));
        }
        Ok(f)
    }

    /// Re-validates the lines as a spread.
    pub fn spread(&self) -> Result<Spread> {
        let f = self.field()?;
        let lines = self
            .lines
            .iter()
            .map(|[u, v]| {
                if u.len() != 4 || v.len() != 4 {
                    return Err(Error::DimensionMismatch { expected: 4, got: u.len().min(v.len()) });
                }
                for &x in u.iter().chain(v) {
                    f.check(x)?;
                }
                let l = Subspace::span(&f, 4, &[u.clone(), v.clone()]);
                if l.rank() != 2 {
                    return Err(Error::DependentVectors);
                }
                Ok(l)
            })
            .collect::<Result<Vec<_>>>()?;
        Spread::new(&f, lines)
    }
}

/// Pretty JSON with a trailing newline; key order is fixed by the types.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klein::{char3_census_form, char3_spread, spread_census};
    use crate::ovoids::{find_m_ovoid, verify_m_ovoid, SearchOptions};

    #[test]
    fn ovoid_file_round_trip() {
        let s = PolarSpace::build(&"Q-:5:3".parse().unwrap()).unwrap();
        let none = PointSet::empty(112);
        let o = find_m_ovoid(&s, 2, &none, &none, &SearchOptions::default()).unwrap();
        let file = PointSetFile::for_ovoid(&s, &o, Some(2));
        let text = to_json(&file);
        assert!(text.contains("\"space\": \"Q-:5:3\""));
        let back: PointSetFile = from_json(&text).unwrap();
        assert_eq!(back, file);
        let set = back.to_pointset(&s).unwrap();
        assert_eq!(set, o);
        assert_eq!(verify_m_ovoid(&s, &set), verify_m_ovoid(&s, &o));
    }

    #[test]
    fn plain_point_files_omit_ovoid_fields() {
        let f = FieldCtx::new(9).unwrap();
        let file = PointSetFile::from_points(&f, 3, &[ProjPoint::new(&f, &[0, 1, 5, 8]).unwrap()]);
        let text = to_json(&file);
        assert!(!text.contains("claimed_m"));
        assert_eq!(file.field().unwrap(), f);
        assert_eq!(file.projective_points().unwrap()[0].coords(), &[0, 1, 5, 8]);
    }

    #[test]
    fn bad_files_are_rejected() {
        let s = PolarSpace::build(&"Q-:3:3".parse().unwrap()).unwrap();
        let f = s.field();
        let nonsingular = ProjPoint::new(f, &[0, 0, 1, 0]).unwrap();
        let file = PointSetFile::from_points(f, 3, &[nonsingular]);
        assert_eq!(file.to_pointset(&s), Err(Error::PointNotInSpace));
        let mut wrong_q = file.clone();
        wrong_q.q = 9;
        assert!(wrong_q.field().is_err());
        assert!(from_json::<PointSetFile>("{\"q\": 3}").is_err());
    }

    #[test]
    fn spread_file_round_trip() {
        let f = FieldCtx::new(3).unwrap();
        let spread = char3_spread(&f).unwrap();
        let form = char3_census_form(&f);
        let counts = spread_census(&f, &spread, &form).unwrap();
        let block = CensusBlock { form_gram: form.orthogonality_matrix().to_rows(), counts };
        let file = SpreadFile::new(&f, "char3", &spread, Some(block));
        let text = to_json(&file);
        assert!(text.contains("\"tangent\": 0"));
        let back: SpreadFile = from_json(&text).unwrap();
        assert_eq!(back.spread().unwrap(), spread);
        let mut broken = back.clone();
        broken.lines[1] = broken.lines[0].clone();
        assert!(broken.spread().is_err());
    }
}

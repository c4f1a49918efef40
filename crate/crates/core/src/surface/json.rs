use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EdgeRef, Polygon, TranslationSurface};
use crate::error::Result;
use crate::geom::Vec2;

/// On-disk surface layout:
/// `{"name": str, "polygons": [{"vertices": [[x,y],...]}], "gluings": [[[p,e],[p2,e2]],...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub name: String,
    pub polygons: Vec<PolygonFile>,
    pub gluings: Vec<[[usize; 2]; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonFile {
    pub vertices: Vec<[f64; 2]>,
}

impl From<&TranslationSurface> for SurfaceFile {
    fn from(s: &TranslationSurface) -> Self {
        SurfaceFile {
            name: s.name().to_string(),
            polygons: s
                .polygons()
                .iter()
                .map(|p| PolygonFile {
                    vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
                })
                .collect(),
            gluings: s
                .gluing_pairs()
                .into_iter()
                .map(|(a, b)| [[a.polygon, a.edge], [b.polygon, b.edge]])
                .collect(),
        }
    }
}

impl SurfaceFile {
    /// Surface without validation, for reporting on broken input.
    pub fn into_surface_unchecked(self) -> Result<TranslationSurface> {
        let polygons = self
            .polygons
            .into_iter()
            .map(|p| Polygon::new_unchecked(p.vertices.into_iter().map(|[x, y]| Vec2::new(x, y)).collect()))
            .collect();
        let pairs: Vec<(EdgeRef, EdgeRef)> = self
            .gluings
            .into_iter()
            .map(|[[p, e], [q, f]]| (EdgeRef::new(p, e), EdgeRef::new(q, f)))
            .collect();
        TranslationSurface::new(self.name, polygons, &pairs)
    }
}

impl TranslationSurface {
    /// Serializes with shortest round-trip float formatting, so a reload is
    /// bit-identical.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SurfaceFile::from(self))?)
    }

    /// Parses and validates.
    pub fn from_json(text: &str) -> Result<TranslationSurface> {
        let s = Self::from_json_unchecked(text)?;
        s.ensure_valid()?;
        Ok(s)
    }

    pub fn from_json_unchecked(text: &str) -> Result<TranslationSurface> {
        let file: SurfaceFile = serde_json::from_str(text)?;
        file.into_surface_unchecked()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TranslationSurface> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

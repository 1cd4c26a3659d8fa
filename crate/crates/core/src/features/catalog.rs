use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

pub const NUM_FEATURES: usize = 98;
pub const CATALOG_VERSION: &str = "radar-features-1";

/// Feature groups used when analysing which features each classifier keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    /// Amplitude.
    A,
    /// Range.
    R,
    /// Angle (phi).
    P,
    /// Doppler velocity.
    V,
    /// Shape and compactness.
    S,
    /// Spatial Doppler distribution.
    D,
}

impl Category {
    pub const ALL: [Category; 6] = [Category::A, Category::R, Category::P, Category::V, Category::S, Category::D];

    pub fn letter(self) -> char {
        match self {
            Category::A => 'A',
            Category::R => 'R',
            Category::P => 'P',
            Category::V => 'V',
            Category::S => 'S',
            Category::D => 'D',
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub index: usize,
    pub name: String,
    pub category: Category,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureCatalog {
    pub version: String,
    pub entries: Vec<CatalogEntry>,
}

/// Base quantities the nine summary statistics are computed over.
pub(crate) const BASES: [(&str, Category); 4] = [
    ("Amplitude", Category::A),
    ("Range", Category::R),
    ("Angle", Category::P),
    ("Velocity", Category::V),
];

pub(crate) const STATS: [&str; 9] = ["min", "max", "mean", "meanAbsDev", "var", "stdDev", "skewness", "kurtosis", "spread"];

fn build() -> FeatureCatalog {
    use Category::*;
    let mut names: Vec<(String, Category)> = Vec::with_capacity(NUM_FEATURES);
    for (base, cat) in BASES {
        for stat in STATS {
            names.push((format!("{stat}{base}"), cat));
        }
    }
    let transformed = [("MeanAmplitude", A), ("SpreadRange", R), ("SpreadAngle", P), ("MeanVelocity", V)];
    for op in ["log", "sqrt", "quad"] {
        for (base, cat) in transformed {
            names.push((format!("{op}{base}"), cat));
        }
    }
    for family in ["covEV", "covEV2", "con95axis"] {
        for k in 1..=2 {
            names.push((format!("{family}XY{k}"), S));
        }
        for k in 1..=4 {
            names.push((format!("{family}XYVA{k}"), D));
        }
    }
    let singles: [(&str, Category); 4] = [
        ("AmpSum", A),
        ("PhiSpreadComp", P),
        ("StdDevDoppler", V),
        ("fracStationary", V),
    ];
    names.extend(singles.iter().map(|(n, c)| (n.to_string(), *c)));
    for n in ["nDetects", "nDetectsComp", "nDetectsVolcan", "CorePoints", "MeanDist", "clusterWidth", "maxDistDev"] {
        names.push((n.to_string(), S));
    }
    for k in 1..=3 {
        names.push((format!("CBO{k}"), S));
    }
    for hull in ["RectHull", "ConvexHull"] {
        for q in ["Area", "Perimeter", "Density"] {
            names.push((format!("{hull}{q}"), S));
        }
    }
    for n in ["CircleFit", "Circularity", "Compactness", "xyLinearity"] {
        names.push((n.to_string(), S));
    }
    for n in [
        "rVrLinearity",
        "phiVrLinearity",
        "majorVrLinearity",
        "minorVrLinearity",
        "rVrSpread",
        "phiVrSpread",
        "majorVrSpread",
        "minorVrSpread",
    ] {
        names.push((n.to_string(), D));
    }
    assert_eq!(names.len(), NUM_FEATURES);
    FeatureCatalog {
        version: CATALOG_VERSION.to_string(),
        entries: names
            .into_iter()
            .enumerate()
            .map(|(index, (name, category))| CatalogEntry { index, name, category })
            .collect(),
    }
}

impl FeatureCatalog {
    pub fn standard() -> &'static FeatureCatalog {
        static CATALOG: OnceLock<FeatureCatalog> = OnceLock::new();
        CATALOG.get_or_init(build)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.entries[index].name
    }

    pub fn category(&self, index: usize) -> Category {
        self.entries[index].category
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }

    pub fn category_counts(&self) -> [usize; 6] {
        let mut counts = [0; 6];
        for e in &self.entries {
            counts[e.category as usize] += 1;
        }
        counts
    }
}

/// Catalog slots, so the extractor and its tests address features by name
/// rather than by magic numbers.
pub mod idx {
    pub const BASE_STATS: usize = 0;
    pub const TRANSFORMS: usize = 36;
    pub const COV: usize = 48;
    pub const AMP_SUM: usize = 66;
    pub const PHI_SPREAD_COMP: usize = 67;
    pub const STD_DEV_DOPPLER: usize = 68;
    pub const FRAC_STATIONARY: usize = 69;
    pub const N_DETECTS: usize = 70;
    pub const CIRCLE_FIT: usize = 86;
    pub const XY_LINEARITY: usize = 89;
    pub const D_FAMILY: usize = 90;
}

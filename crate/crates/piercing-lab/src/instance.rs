//! Seeded instance generation and the JSON instance-file format.
//!
//! Generation is deterministic: the same spec always produces the same
//! family and byte-identical files. Density control targets a packing
//! number by rejection sampling over derived sub-seeds (the attempt index
//! perturbs the seed, never the global RNG state).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point, Region, RegionFamily};
use crate::oracle::{max_packing_exact, OracleBudget, OracleError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyClass {
    Discs,
    UnitSquares,
    Polygons,
}

impl std::fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyClass::Discs => write!(f, "discs"),
            FamilyClass::UnitSquares => write!(f, "unit_squares"),
            FamilyClass::Polygons => write!(f, "polygons"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    pub class: FamilyClass,
    pub n: usize,
    /// Target packing number ν; generation resamples (up to 100 attempts)
    /// until the measured ν is within ±1 of the target.
    pub density: Option<usize>,
    pub radius_range: (f64, f64),
    pub seed: u64,
    /// Side length of the square centers are drawn from.
    pub bbox: f64,
}

impl InstanceSpec {
    pub fn discs(n: usize, seed: u64) -> Self {
        InstanceSpec {
            class: FamilyClass::Discs,
            n,
            density: None,
            radius_range: (0.5, 1.5),
            seed,
            bbox: 10.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("no attempt out of {attempts} reached packing number ≤ {target}")]
    DensityUnreachable { attempts: usize, target: usize },
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub family: RegionFamily,
    /// Exact packing number, measured when density control is active.
    pub measured_nu: Option<usize>,
    /// Rejected attempts before acceptance (0 = first sample).
    pub resamples: usize,
}

fn validate_spec(spec: &InstanceSpec) -> Result<(), InstanceError> {
    if spec.n == 0 {
        return Err(InstanceError::InvalidSpec("n must be at least 1".into()));
    }
    let (lo, hi) = spec.radius_range;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(InstanceError::InvalidSpec(format!(
            "radius range must satisfy 0 < min ≤ max, got [{lo}, {hi}]"
        )));
    }
    if !(spec.bbox > 0.0 && spec.bbox.is_finite()) {
        return Err(InstanceError::InvalidSpec(format!(
            "bbox side must be positive, got {}",
            spec.bbox
        )));
    }
    if spec.class == FamilyClass::UnitSquares && spec.bbox <= 1.0 {
        return Err(InstanceError::InvalidSpec(
            "unit squares need bbox > 1".into(),
        ));
    }
    if spec.density.is_some() && spec.n > OracleBudget::default().max_regions {
        return Err(InstanceError::InvalidSpec(format!(
            "density control measures exact ν and needs n ≤ {}, got {}",
            OracleBudget::default().max_regions,
            spec.n
        )));
    }
    Ok(())
}

fn sub_seed(seed: u64, attempt: u64) -> u64 {
    seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Deterministic family from the spec. With density control the sampler
/// rejects until ν is within ±1 of the target (cap 100 attempts, then the
/// last sample is reported with its actual ν).
pub fn generate(spec: &InstanceSpec) -> Result<GeneratedInstance, InstanceError> {
    validate_spec(spec)?;
    let attempts = if spec.density.is_some() { 100 } else { 1 };
    let mut out: Option<GeneratedInstance> = None;
    for attempt in 0..attempts {
        let family = sample_family(spec, attempt as u64)?;
        let measured_nu = match spec.density {
            Some(_) => Some(max_packing_exact(&family, &OracleBudget::default())?.len()),
            None => None,
        };
        let accept = match (spec.density, measured_nu) {
            (Some(target), Some(nu)) => nu.abs_diff(target) <= 1,
            _ => true,
        };
        out = Some(GeneratedInstance {
            family,
            measured_nu,
            resamples: attempt,
        });
        if accept {
            break;
        }
    }
    Ok(out.expect("at least one attempt"))
}

/// Like [`generate`] with a hard (p,2) guarantee: resample until ν ≤ p−1,
/// preferring ν ∈ {p−2, p−1}. The sampling box adapts multiplicatively to
/// the measured packing number, so any target in [1, n] is reachable.
/// Deterministic in (class, n, p, seed). Used by the experiment driver.
pub fn generate_p2(
    class: FamilyClass,
    n: usize,
    p: usize,
    seed: u64,
) -> Result<(RegionFamily, usize), InstanceError> {
    if p < 2 {
        return Err(InstanceError::InvalidSpec(format!(
            "p must be at least 2, got {p}"
        )));
    }
    let target = p - 1;
    let min_bbox = match class {
        FamilyClass::UnitSquares => 1.05,
        _ => 0.5,
    };
    let mut bbox = (2.0 * (target as f64).sqrt() + 1.0).max(min_bbox + 0.5);
    let mut spec = InstanceSpec {
        class,
        n,
        density: Some(target),
        radius_range: (0.6, 1.4),
        seed,
        bbox,
    };
    validate_spec(&spec)?;
    // ν can never exceed n, so cap what the rejection insists on
    let reachable = target.min(n);
    let attempts = 200;
    for attempt in 0..attempts {
        spec.bbox = bbox;
        let family = sample_family(&spec, attempt as u64)?;
        let nu = max_packing_exact(&family, &OracleBudget::default())?.len();
        if nu <= target && nu + 1 >= reachable {
            return Ok((family, nu));
        }
        // scale the box area toward the target packing number
        let ratio = ((target as f64 + 0.5) / (nu as f64 + 0.5)).sqrt();
        bbox = (bbox * ratio.clamp(0.75, 1.3)).max(min_bbox);
    }
    Err(InstanceError::DensityUnreachable { attempts, target })
}

fn sample_family(spec: &InstanceSpec, attempt: u64) -> Result<RegionFamily, InstanceError> {
    let mut rng = ChaCha20Rng::seed_from_u64(sub_seed(spec.seed, attempt));
    let (rmin, rmax) = spec.radius_range;
    let mut regions = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let region = match spec.class {
            FamilyClass::Discs => Region::disc(
                Point::new(
                    rng.gen_range(0.0..spec.bbox),
                    rng.gen_range(0.0..spec.bbox),
                ),
                rng.gen_range(rmin..=rmax),
            )?,
            FamilyClass::UnitSquares => {
                let x = rng.gen_range(0.0..spec.bbox - 1.0);
                let y = rng.gen_range(0.0..spec.bbox - 1.0);
                Region::convex_polygon(vec![
                    Point::new(x, y),
                    Point::new(x + 1.0, y),
                    Point::new(x + 1.0, y + 1.0),
                    Point::new(x, y + 1.0),
                ])?
            }
            FamilyClass::Polygons => random_convex_polygon(&mut rng, spec)?,
        };
        regions.push(region);
    }
    Ok(RegionFamily::new(regions)?)
}

/// Random strictly convex polygon: 3..=8 vertices on a circle at sorted
/// angles with a minimum angular gap.
fn random_convex_polygon(
    rng: &mut ChaCha20Rng,
    spec: &InstanceSpec,
) -> Result<Region, InstanceError> {
    let (rmin, rmax) = spec.radius_range;
    let k = rng.gen_range(3..=8usize);
    let cx = rng.gen_range(0.0..spec.bbox);
    let cy = rng.gen_range(0.0..spec.bbox);
    let r = rng.gen_range(rmin..=rmax);
    let tau = 2.0 * std::f64::consts::PI;
    let min_gap = 0.15;
    let mut angles: Vec<f64> = Vec::new();
    for _ in 0..50 {
        let mut a: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..tau)).collect();
        a.sort_by(f64::total_cmp);
        let ok = a.windows(2).all(|w| w[1] - w[0] >= min_gap)
            && (a[0] + tau - a[k - 1]) >= min_gap;
        if ok {
            angles = a;
            break;
        }
    }
    if angles.is_empty() {
        // fallback: regular polygon at a random rotation
        let rot = rng.gen_range(0.0..tau);
        angles = (0..k).map(|i| rot + tau * i as f64 / k as f64).collect();
    }
    let vertices = angles
        .iter()
        .map(|a| Point::new(cx + r * a.cos(), cy + r * a.sin()))
        .collect();
    Ok(Region::convex_polygon(vertices)?)
}

// ---------------------------------------------------------------------------
// Instance file format

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    regions: Vec<RegionJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RegionJson {
    Disc { cx: f64, cy: f64, r: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

/// Serialize a family to the instance-file JSON (round-trip exact floats).
pub fn to_json(f: &RegionFamily) -> String {
    let file = InstanceFile {
        regions: f
            .regions()
            .iter()
            .map(|r| match r {
                Region::Disc { center, radius } => RegionJson::Disc {
                    cx: center.x,
                    cy: center.y,
                    r: *radius,
                },
                Region::Polygon(poly) => RegionJson::Polygon {
                    vertices: poly.vertices().iter().map(|v| [v.x, v.y]).collect(),
                },
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("instance serialization");
    s.push('\n');
    s
}

/// Parse an instance file; `path` is only used in diagnostics.
pub fn from_json(text: &str, path: &str) -> Result<RegionFamily, InstanceError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        path: path.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut regions = Vec::with_capacity(file.regions.len());
    for (i, r) in file.regions.into_iter().enumerate() {
        let region = match r {
            RegionJson::Disc { cx, cy, r } => Region::disc(Point::new(cx, cy), r),
            RegionJson::Polygon { vertices } => Region::convex_polygon(
                vertices.into_iter().map(|[x, y]| Point::new(x, y)).collect(),
            ),
        }
        .map_err(|e| InstanceError::InvalidSpec(format!("region {i}: {e}")))?;
        regions.push(region);
    }
    Ok(RegionFamily::new(regions)?)
}

pub fn write_instance(path: &Path, f: &RegionFamily) -> Result<(), InstanceError> {
    std::fs::write(path, to_json(f)).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_instance(path: &Path) -> Result<RegionFamily, InstanceError> {
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_json(&text, &path.display().to_string())
}

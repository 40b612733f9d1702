//! Material database: refractive indices, absorption profiles, roughness.
//!
//! Every medium the channel model touches is a [`MediumSpec`]: a refractive
//! index, a power absorption profile `alpha(f)` in 1/m, and the RMS roughness
//! of the interface the medium presents. Profiles are either a constant or a
//! sampled curve interpolated linearly in log-frequency.
//!
//! The built-in presets cover the three wall layers (air, titanium-white
//! paint, plaster) plus a handful of polymer substrates with published
//! terahertz data. Paint and plaster absorption presets are calibrated
//! constants at 200 GHz (321.2 /m and 229.7 /m) chosen so the five-path model
//! reproduces its reference attenuation deltas; see `propagation::calibrate_absorption`.
//!
//! A database can be extended from a JSON file (`iop-materials/1` schema);
//! file entries override presets by name.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Scalar, SPEED_OF_LIGHT};

// ---------------------------------------------------------------------------
// Absorption profiles
// ---------------------------------------------------------------------------

/// Power absorption coefficient as a function of frequency, in 1/m.
#[derive(Debug, Clone, PartialEq)]
pub enum AbsorptionProfile<S = f64> {
    /// Frequency-flat coefficient.
    Constant(S),
    /// Sampled curve `(f_hz, alpha_per_m)`, strictly increasing in frequency.
    Samples(Vec<(S, S)>),
}

/// Result of an absorption lookup.
///
/// `extrapolated` is set when the requested frequency fell outside a sampled
/// profile and the nearest end value was used instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSample<S = f64> {
    pub per_m: S,
    pub extrapolated: bool,
}

// ---------------------------------------------------------------------------
// Medium specification
// ---------------------------------------------------------------------------

/// A propagation medium: index, absorption profile, interface roughness.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumSpec<S = f64> {
    name: String,
    refractive_index: S,
    absorption: AbsorptionProfile<S>,
    roughness_rms: S,
}

impl<S: Scalar> MediumSpec<S> {
    /// Build a validated medium.
    ///
    /// Rejects indices below 1, negative absorption or roughness, empty
    /// sample lists, and sample frequencies that are not strictly increasing.
    pub fn new(
        name: impl Into<String>,
        refractive_index: S,
        absorption: AbsorptionProfile<S>,
        roughness_rms: S,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: &str| Error::InvalidMaterial {
            name: name.clone(),
            reason: reason.to_string(),
        };

        if !(refractive_index >= S::one()) {
            return Err(invalid("refractive index must be >= 1"));
        }
        if !(roughness_rms >= S::zero()) {
            return Err(invalid("roughness RMS must be >= 0"));
        }
        match &absorption {
            AbsorptionProfile::Constant(a) => {
                if !(*a >= S::zero()) {
                    return Err(invalid("absorption coefficient must be >= 0"));
                }
            }
            AbsorptionProfile::Samples(samples) => {
                if samples.is_empty() {
                    return Err(invalid("absorption profile has no samples"));
                }
                for window in samples.windows(2) {
                    if !(window[1].0 > window[0].0) {
                        return Err(invalid("sample frequencies must strictly increase"));
                    }
                }
                for (f, a) in samples {
                    if !(*f > S::zero()) {
                        return Err(invalid("sample frequencies must be positive"));
                    }
                    if !(*a >= S::zero()) {
                        return Err(invalid("absorption coefficient must be >= 0"));
                    }
                }
            }
        }

        Ok(Self {
            name,
            refractive_index,
            absorption,
            roughness_rms,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn refractive_index(&self) -> S {
        self.refractive_index
    }

    pub fn absorption(&self) -> &AbsorptionProfile<S> {
        &self.absorption
    }

    /// RMS height (m) of the interface this medium presents to the layer above.
    pub fn roughness_rms(&self) -> S {
        self.roughness_rms
    }

    /// Same medium with a different roughness (used by sensitivity studies).
    pub fn with_roughness(mut self, roughness_rms: S) -> Result<Self> {
        if !(roughness_rms >= S::zero()) {
            return Err(Error::InvalidMaterial {
                name: self.name.clone(),
                reason: "roughness RMS must be >= 0".into(),
            });
        }
        self.roughness_rms = roughness_rms;
        Ok(self)
    }

    /// Same medium with a different constant absorption (used by calibration).
    pub fn with_constant_absorption(mut self, alpha_per_m: S) -> Result<Self> {
        if !(alpha_per_m >= S::zero()) {
            return Err(Error::InvalidMaterial {
                name: self.name.clone(),
                reason: "absorption coefficient must be >= 0".into(),
            });
        }
        self.absorption = AbsorptionProfile::Constant(alpha_per_m);
        Ok(self)
    }

    /// Absorption coefficient at `frequency_hz`.
    ///
    /// Sampled profiles interpolate linearly in log-frequency; outside the
    /// sampled range the end value is held constant and the result is marked
    /// as extrapolated.
    pub fn alpha_at(&self, frequency_hz: S) -> AlphaSample<S> {
        match &self.absorption {
            AbsorptionProfile::Constant(a) => AlphaSample {
                per_m: *a,
                extrapolated: false,
            },
            AbsorptionProfile::Samples(samples) => {
                let first = samples[0];
                let last = samples[samples.len() - 1];
                if frequency_hz <= first.0 {
                    return AlphaSample {
                        per_m: first.1,
                        extrapolated: frequency_hz < first.0,
                    };
                }
                if frequency_hz >= last.0 {
                    return AlphaSample {
                        per_m: last.1,
                        extrapolated: frequency_hz > last.0,
                    };
                }
                let idx = samples
                    .windows(2)
                    .position(|w| frequency_hz <= w[1].0)
                    .expect("frequency bracketed by samples");
                let (f0, a0) = samples[idx];
                let (f1, a1) = samples[idx + 1];
                let t = (frequency_hz / f0).ln() / (f1 / f0).ln();
                AlphaSample {
                    per_m: a0 + (a1 - a0) * t,
                    extrapolated: false,
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Conversions from published dielectric data
// ---------------------------------------------------------------------------

/// Refractive index from relative permittivity: `n = sqrt(eps_r)`.
pub fn refractive_from_permittivity<S: Scalar>(eps_r: S) -> Result<S> {
    if !(eps_r >= S::one()) {
        return Err(Error::Domain(format!(
            "relative permittivity must be >= 1, got {eps_r}"
        )));
    }
    Ok(eps_r.sqrt())
}

/// Power absorption coefficient (1/m) from a loss tangent:
/// `alpha = 2*pi*f*sqrt(eps_r)*tan_delta / c`.
pub fn absorption_from_loss_tangent<S: Scalar>(
    frequency_hz: S,
    eps_r: S,
    tan_delta: S,
) -> Result<S> {
    if !(frequency_hz > S::zero()) {
        return Err(Error::Domain("frequency must be positive".into()));
    }
    if !(tan_delta >= S::zero()) {
        return Err(Error::Domain("loss tangent must be >= 0".into()));
    }
    let n = refractive_from_permittivity(eps_r)?;
    let two_pi = S::PI() + S::PI();
    Ok(two_pi * frequency_hz * n * tan_delta / S::c64(SPEED_OF_LIGHT))
}

// ---------------------------------------------------------------------------
// Atmospheric absorption
// ---------------------------------------------------------------------------

/// Coarse sea-level atmospheric power absorption, (f_hz, alpha_per_m).
///
/// Ten points spanning 0.1-1 THz, magnitudes consistent with standard
/// clear-air gas attenuation curves (fractions of a dB/km in the low windows,
/// rising steeply past the strong water lines). At the centimeter scales this
/// model cares about the contribution is microscopic: a 4 cm path at 250 GHz
/// costs well under 0.02 dB.
const ATMOSPHERIC_TABLE: [(f64, f64); 10] = [
    (0.10e12, 9.2e-5),
    (0.15e12, 4.6e-4),
    (0.20e12, 6.9e-4),
    (0.25e12, 9.2e-4),
    (0.30e12, 1.4e-3),
    (0.40e12, 4.6e-3),
    (0.50e12, 1.2e-2),
    (0.60e12, 4.6e-2),
    (0.80e12, 7.0e-2),
    (1.00e12, 2.3e-1),
];

/// Atmospheric absorption coefficient (1/m) at `frequency_hz`.
///
/// Interpolates the built-in table linearly in log-frequency; frequencies
/// outside 0.1-1 THz are an error.
pub fn atmospheric_alpha<S: Scalar>(frequency_hz: S) -> Result<S> {
    let f = frequency_hz
        .to_f64()
        .ok_or_else(|| Error::Domain("frequency not representable".into()))?;
    let (min, max) = (ATMOSPHERIC_TABLE[0].0, ATMOSPHERIC_TABLE[9].0);
    if !(f >= min && f <= max) {
        return Err(Error::FrequencyOutOfRange {
            frequency_hz: f,
            min_hz: min,
            max_hz: max,
        });
    }
    let idx = ATMOSPHERIC_TABLE
        .windows(2)
        .position(|w| f <= w[1].0)
        .unwrap_or(ATMOSPHERIC_TABLE.len() - 2);
    let (f0, a0) = ATMOSPHERIC_TABLE[idx];
    let (f1, a1) = ATMOSPHERIC_TABLE[idx + 1];
    let t = (f / f0).ln() / (f1 / f0).ln();
    Ok(S::c64(a0 + (a1 - a0) * t))
}

// ---------------------------------------------------------------------------
// Published polymer reference data
// ---------------------------------------------------------------------------

/// One row of the polymer substrate data sheet the presets are built from.
///
/// `loss_tangent` is the midpoint of the published range where a range was
/// given. `tabulated_index` is a directly measured index, kept in preference
/// to `sqrt(permittivity)` when the two disagree (PTFE's tabulated 1.42 vs
/// sqrt(2.39) = 1.546 is the known offender; the preset stores 1.42).
///
/// Two rows carry known internal inconsistencies in the published data and
/// are kept as published: PTFE's index (above), and polypropylene's loss
/// tangent of 0.12, which converts to an absorption ~30x the tabulated
/// 200 1/m. Presets always use the tabulated absorption column, so the
/// suspect loss tangent never feeds a preset.
#[derive(Debug, Clone, Copy)]
pub struct PolymerDatum {
    pub name: &'static str,
    pub permittivity: f64,
    pub loss_tangent: Option<f64>,
    pub tabulated_alpha_per_m: f64,
    pub tabulated_index: Option<f64>,
}

/// Frequency band (Hz) over which the polymer table values were measured.
pub const POLYMER_BAND_HZ: (f64, f64) = (0.2e12, 2.5e12);

/// Polymer substrate data sheet.
pub const POLYMER_TABLE: [PolymerDatum; 5] = [
    PolymerDatum {
        name: "PET",
        permittivity: 2.86,
        loss_tangent: Some(0.0625),
        tabulated_alpha_per_m: 2500.0,
        tabulated_index: None,
    },
    PolymerDatum {
        name: "PEN",
        permittivity: 2.56,
        loss_tangent: Some(0.003),
        tabulated_alpha_per_m: 100.0,
        tabulated_index: None,
    },
    PolymerDatum {
        name: "PMMA",
        permittivity: 2.22,
        loss_tangent: Some(0.056),
        tabulated_alpha_per_m: 2200.0,
        tabulated_index: Some(1.49),
    },
    PolymerDatum {
        name: "polypropylene",
        permittivity: 3.0,
        loss_tangent: Some(0.12),
        tabulated_alpha_per_m: 200.0,
        tabulated_index: None,
    },
    PolymerDatum {
        name: "PTFE",
        permittivity: 2.39,
        loss_tangent: None,
        tabulated_alpha_per_m: 160.0,
        tabulated_index: Some(1.42),
    },
];

// ---------------------------------------------------------------------------
// Database
// ---------------------------------------------------------------------------

/// Where a database entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Built-in preset.
    Preset,
    /// Loaded from a materials file.
    File,
    /// Written by the absorption calibration.
    Calibrated,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Preset => write!(f, "preset"),
            Provenance::File => write!(f, "file"),
            Provenance::Calibrated => write!(f, "calibrated"),
        }
    }
}

/// Calibrated paint absorption preset at 200 GHz, 1/m.
pub const PAINT_ALPHA_PRESET: f64 = 321.2;
/// Calibrated plaster absorption preset at 200 GHz, 1/m.
pub const PLASTER_ALPHA_PRESET: f64 = 229.7;
/// Titanium-white paint refractive index preset.
pub const PAINT_INDEX_PRESET: f64 = 2.13;
/// Plaster refractive index preset.
pub const PLASTER_INDEX_PRESET: f64 = 1.73;

/// Named collection of media, with provenance tracking.
///
/// Iteration order is the lexicographic entry name, so listings and
/// serializations are deterministic.
#[derive(Debug, Clone)]
pub struct MaterialDb<S = f64> {
    entries: BTreeMap<String, (MediumSpec<S>, Provenance)>,
}

impl<S: Scalar> MaterialDb<S> {
    /// Empty database.
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    /// Database preloaded with the wall-layer and polymer presets.
    pub fn with_presets() -> Self {
        let mut db = Self::empty();
        let preset = |db: &mut Self, spec: MediumSpec<S>| {
            db.entries
                .insert(spec.name().to_string(), (spec, Provenance::Preset));
        };

        let air_samples = ATMOSPHERIC_TABLE
            .iter()
            .map(|&(f, a)| (S::c64(f), S::c64(a)))
            .collect();
        preset(
            &mut db,
            MediumSpec::new("air", S::one(), AbsorptionProfile::Samples(air_samples), S::zero())
                .expect("air preset is valid"),
        );
        preset(
            &mut db,
            MediumSpec::new(
                "titanium-white-paint",
                S::c64(PAINT_INDEX_PRESET),
                AbsorptionProfile::Constant(S::c64(PAINT_ALPHA_PRESET)),
                S::zero(),
            )
            .expect("paint preset is valid"),
        );
        preset(
            &mut db,
            MediumSpec::new(
                "plaster",
                S::c64(PLASTER_INDEX_PRESET),
                AbsorptionProfile::Constant(S::c64(PLASTER_ALPHA_PRESET)),
                S::zero(),
            )
            .expect("plaster preset is valid"),
        );

        for datum in POLYMER_TABLE {
            let n = datum
                .tabulated_index
                .unwrap_or_else(|| datum.permittivity.sqrt());
            preset(
                &mut db,
                MediumSpec::new(
                    datum.name,
                    S::c64(n),
                    AbsorptionProfile::Constant(S::c64(datum.tabulated_alpha_per_m)),
                    S::zero(),
                )
                .expect("polymer preset is valid"),
            );
        }
        db
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Insert or replace an entry.
    pub fn insert(&mut self, spec: MediumSpec<S>, provenance: Provenance) {
        self.entries
            .insert(spec.name().to_string(), (spec, provenance));
    }

    /// Look up a medium by name.
    pub fn get(&self, name: &str) -> Result<&MediumSpec<S>> {
        self.entries
            .get(name)
            .map(|(spec, _)| spec)
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    /// Look up a medium and its provenance.
    pub fn get_with_provenance(&self, name: &str) -> Result<(&MediumSpec<S>, Provenance)> {
        self.entries
            .get(name)
            .map(|(spec, p)| (spec, *p))
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    /// Iterate entries in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&MediumSpec<S>, Provenance)> {
        self.entries.values().map(|(spec, p)| (spec, *p))
    }

    /// Overlay entries parsed from a materials file onto this database.
    fn merge_file_entries(&mut self, entries: Vec<MediumSpec<S>>) {
        for spec in entries {
            self.insert(spec, Provenance::File);
        }
    }
}

impl Default for MaterialDb<f64> {
    fn default() -> Self {
        Self::with_presets()
    }
}

// ---------------------------------------------------------------------------
// Materials file (iop-materials/1)
// ---------------------------------------------------------------------------

/// Schema version string accepted by [`load_materials`].
pub const MATERIALS_SCHEMA_VERSION: &str = "iop-materials/1";

#[derive(Debug, Serialize, Deserialize)]
struct MaterialsFile {
    version: String,
    materials: Vec<MaterialEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MaterialEntry {
    name: String,
    refractive_index: f64,
    #[serde(default)]
    roughness_rms_m: f64,
    absorption: AbsorptionEntry,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum AbsorptionEntry {
    Constant { constant_per_m: f64 },
    Samples { samples: Vec<(f64, f64)> },
}

fn parse_materials<S: Scalar>(path_label: &str, text: &str) -> Result<Vec<MediumSpec<S>>> {
    let file: MaterialsFile =
        serde_json::from_str(text).map_err(|e| Error::MaterialsFile {
            path: path_label.to_string(),
            reason: e.to_string(),
        })?;
    if file.version != MATERIALS_SCHEMA_VERSION {
        return Err(Error::MaterialsFile {
            path: path_label.to_string(),
            reason: format!(
                "unsupported version '{}', expected '{}'",
                file.version, MATERIALS_SCHEMA_VERSION
            ),
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(file.materials.len());
    for entry in file.materials {
        if !seen.insert(entry.name.clone()) {
            return Err(Error::DuplicateMaterial(entry.name));
        }
        let absorption = match entry.absorption {
            AbsorptionEntry::Constant { constant_per_m } => {
                AbsorptionProfile::Constant(S::c64(constant_per_m))
            }
            AbsorptionEntry::Samples { samples } => AbsorptionProfile::Samples(
                samples
                    .into_iter()
                    .map(|(f, a)| (S::c64(f), S::c64(a)))
                    .collect(),
            ),
        };
        out.push(MediumSpec::new(
            entry.name,
            S::c64(entry.refractive_index),
            absorption,
            S::c64(entry.roughness_rms_m),
        )?);
    }
    Ok(out)
}

/// Load a materials database: presets overlaid with the entries of `path`.
///
/// A zero-length file is treated as an empty overlay and yields just the
/// presets. Entries sharing a name with a preset replace it.
pub fn load_materials<S: Scalar>(path: impl AsRef<Path>) -> Result<MaterialDb<S>> {
    let path = path.as_ref();
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::MaterialsFile {
        path: label.clone(),
        reason: e.to_string(),
    })?;
    let mut db = MaterialDb::<S>::with_presets();
    if !text.trim().is_empty() {
        db.merge_file_entries(parse_materials(&label, &text)?);
    }
    Ok(db)
}

/// Parse materials from an in-memory JSON string (presets overlaid).
pub fn load_materials_str<S: Scalar>(text: &str) -> Result<MaterialDb<S>> {
    let mut db = MaterialDb::<S>::with_presets();
    if !text.trim().is_empty() {
        db.merge_file_entries(parse_materials::<S>("<inline>", text)?);
    }
    Ok(db)
}

/// Serialize media to the `iop-materials/1` JSON schema.
pub fn materials_to_json<S: Scalar>(media: &[MediumSpec<S>]) -> Result<String> {
    let to_f64 = |v: S| {
        v.to_f64()
            .ok_or_else(|| Error::Domain("value not representable as f64".into()))
    };
    let mut entries = Vec::with_capacity(media.len());
    for spec in media {
        let absorption = match spec.absorption() {
            AbsorptionProfile::Constant(a) => AbsorptionEntry::Constant {
                constant_per_m: to_f64(*a)?,
            },
            AbsorptionProfile::Samples(samples) => AbsorptionEntry::Samples {
                samples: samples
                    .iter()
                    .map(|&(f, a)| Ok((to_f64(f)?, to_f64(a)?)))
                    .collect::<Result<Vec<_>>>()?,
            },
        };
        entries.push(MaterialEntry {
            name: spec.name().to_string(),
            refractive_index: to_f64(spec.refractive_index())?,
            roughness_rms_m: to_f64(spec.roughness_rms())?,
            absorption,
        });
    }
    let file = MaterialsFile {
        version: MATERIALS_SCHEMA_VERSION.to_string(),
        materials: entries,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::MaterialsFile {
        path: "<serialize>".into(),
        reason: e.to_string(),
    })
}

// ---------------------------------------------------------------------------

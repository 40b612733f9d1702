//! Ray geometry for transceivers embedded in a painted wall.
//!
//! The scene is a three-layer stack: an air half-space on top, a thin paint
//! layer, and a plaster half-space below. Both endpoints of a link sit inside
//! the paint. Five ray paths connect them:
//!
//! * `DW` - the direct ray through the paint.
//! * `RW-A`, `RW-P` - single specular bounces off the air-paint and
//!   paint-plaster interfaces, built with the mirror-image construction.
//! * `LW-A`, `LW-P` - lateral waves: the ray meets an interface exactly at
//!   the critical angle, skims along it inside the rarer medium (air above,
//!   plaster below), and re-enters at the critical angle to reach the
//!   receiver. These exist only when the horizontal separation is wide
//!   enough for both critical-angle slants to fit.
//!
//! This module produces pure geometry ([`PathGeometry`]): segment lengths per
//! medium, the interface involved, and the incidence angle there. Loss
//! bookkeeping lives in `propagation`.

use std::fmt;

use crate::error::{Error, Result};
use crate::materials::MediumSpec;
use crate::num::Scalar;

// ---------------------------------------------------------------------------
// Path and medium labels
// ---------------------------------------------------------------------------

/// The five ray paths, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathKind {
    /// Direct wave through the paint.
    Dw,
    /// Reflected wave off the air-paint interface.
    RwA,
    /// Reflected wave off the paint-plaster interface.
    RwP,
    /// Lateral wave along the air-paint interface.
    LwA,
    /// Lateral wave along the paint-plaster interface.
    LwP,
}

impl PathKind {
    /// All five kinds in canonical order.
    pub const ALL: [PathKind; 5] = [
        PathKind::Dw,
        PathKind::RwA,
        PathKind::RwP,
        PathKind::LwA,
        PathKind::LwP,
    ];

    /// Short label: `DW`, `RW-A`, `RW-P`, `LW-A`, `LW-P`.
    pub fn label(self) -> &'static str {
        match self {
            PathKind::Dw => "DW",
            PathKind::RwA => "RW-A",
            PathKind::RwP => "RW-P",
            PathKind::LwA => "LW-A",
            PathKind::LwP => "LW-P",
        }
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Which layer a segment of a path runs through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MediumRole {
    Air,
    Paint,
    Plaster,
}

/// The two interfaces bounding the paint layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interface {
    /// Top surface of the paint (air above).
    AirPaint,
    /// Bottom surface of the paint (plaster below).
    PaintPlaster,
}

impl Interface {
    /// The rarer medium on the far side of this interface.
    pub fn outer_role(self) -> MediumRole {
        match self {
            Interface::AirPaint => MediumRole::Air,
            Interface::PaintPlaster => MediumRole::Plaster,
        }
    }
}

// ---------------------------------------------------------------------------
// Stack and placement
// ---------------------------------------------------------------------------

/// Air / paint / plaster stack with a finite paint thickness.
#[derive(Debug, Clone)]
pub struct LayerStack<S = f64> {
    air: MediumSpec<S>,
    paint: MediumSpec<S>,
    plaster: MediumSpec<S>,
    thickness: S,
}

impl<S: Scalar> LayerStack<S> {
    /// Build a stack. The paint thickness must be positive and finite; the
    /// media themselves were validated at construction. Index ordering is
    /// *not* enforced here - a stack whose paint is not the densest medium is
    /// legal, it simply supports no lateral waves (see [`critical_angle`]).
    pub fn new(
        air: MediumSpec<S>,
        paint: MediumSpec<S>,
        plaster: MediumSpec<S>,
        thickness: S,
    ) -> Result<Self> {
        if !(thickness > S::zero()) || !thickness.is_finite() {
            return Err(Error::InvalidStack(format!(
                "paint thickness must be positive and finite, got {thickness}"
            )));
        }
        Ok(Self {
            air,
            paint,
            plaster,
            thickness,
        })
    }

    pub fn air(&self) -> &MediumSpec<S> {
        &self.air
    }

    pub fn paint(&self) -> &MediumSpec<S> {
        &self.paint
    }

    pub fn plaster(&self) -> &MediumSpec<S> {
        &self.plaster
    }

    /// Paint layer thickness in meters.
    pub fn thickness(&self) -> S {
        self.thickness
    }

    pub fn medium(&self, role: MediumRole) -> &MediumSpec<S> {
        match role {
            MediumRole::Air => &self.air,
            MediumRole::Paint => &self.paint,
            MediumRole::Plaster => &self.plaster,
        }
    }

    /// RMS roughness of an interface, carried by the medium below it.
    pub fn interface_roughness(&self, interface: Interface) -> S {
        match interface {
            Interface::AirPaint => self.paint.roughness_rms(),
            Interface::PaintPlaster => self.plaster.roughness_rms(),
        }
    }

    /// Critical angle (rad, from the normal) for total internal reflection at
    /// an interface, seen from inside the paint. Errors when the far medium
    /// is not rarer than the paint.
    pub fn critical_angle_at(&self, interface: Interface) -> Result<S> {
        let outer = self.medium(interface.outer_role());
        critical_angle(self.paint.refractive_index(), outer.refractive_index())
    }

    /// Check a placement against this stack: both nodes strictly inside the
    /// paint layer and horizontally separated.
    pub fn validate_placement(&self, placement: &Placement<S>) -> Result<()> {
        for (label, depth) in [
            ("transmitter", placement.depth_tx),
            ("receiver", placement.depth_rx),
        ] {
            if !(depth > S::zero() && depth < self.thickness) {
                return Err(Error::InvalidPlacement(format!(
                    "{label} depth {depth} must lie strictly inside the paint layer (0, {})",
                    self.thickness
                )));
            }
        }
        Ok(())
    }

    /// Direct ray between the two nodes.
    pub fn direct_path(&self, placement: &Placement<S>) -> Result<PathGeometry<S>> {
        self.validate_placement(placement)?;
        let dz = placement.depth_tx - placement.depth_rx;
        let length = (placement.horizontal * placement.horizontal + dz * dz).sqrt();
        Ok(PathGeometry {
            kind: PathKind::Dw,
            segments: vec![Segment {
                medium: MediumRole::Paint,
                length,
            }],
            interface: None,
            incidence_rad: None,
            horizontal: placement.horizontal,
        })
    }

    /// Single specular bounce off `interface`, via the mirror image of the
    /// receiver across it.
    pub fn reflected_path(
        &self,
        placement: &Placement<S>,
        interface: Interface,
    ) -> Result<PathGeometry<S>> {
        self.validate_placement(placement)?;
        let (h_tx, h_rx) = self.offsets_to(interface, placement);
        let h_sum = h_tx + h_rx;
        let rho = placement.horizontal;
        let total = (rho * rho + h_sum * h_sum).sqrt();
        // Both legs share the incidence angle; split the mirror length at the
        // bounce point in proportion to the normal offsets.
        let leg_tx = total * (h_tx / h_sum);
        let leg_rx = total * (h_rx / h_sum);
        let incidence = (rho / h_sum).atan();
        Ok(PathGeometry {
            kind: match interface {
                Interface::AirPaint => PathKind::RwA,
                Interface::PaintPlaster => PathKind::RwP,
            },
            segments: vec![
                Segment {
                    medium: MediumRole::Paint,
                    length: leg_tx,
                },
                Segment {
                    medium: MediumRole::Paint,
                    length: leg_rx,
                },
            ],
            interface: Some(interface),
            incidence_rad: Some(incidence),
            horizontal: placement.horizontal,
        })
    }

    /// Lateral wave along `interface`: critical-angle slant up (or down) from
    /// the transmitter, a run in the rarer medium along the interface, and a
    /// critical-angle slant back to the receiver.
    ///
    /// Errors with [`Error::NoCriticalAngle`] when the far medium is not
    /// rarer than the paint and with [`Error::InfeasibleLateralPath`] when
    /// the nodes are too close for both slants to fit.
    pub fn lateral_path(
        &self,
        placement: &Placement<S>,
        interface: Interface,
    ) -> Result<PathGeometry<S>> {
        self.validate_placement(placement)?;
        let theta_c = self.critical_angle_at(interface)?;
        let (h_tx, h_rx) = self.offsets_to(interface, placement);
        let (sin_c, cos_c) = (theta_c.sin(), theta_c.cos());
        let tan_c = sin_c / cos_c;
        let run = placement.horizontal - (h_tx + h_rx) * tan_c;
        if !(run > S::zero()) {
            return Err(Error::InfeasibleLateralPath {
                interface_run_m: run.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(PathGeometry {
            kind: match interface {
                Interface::AirPaint => PathKind::LwA,
                Interface::PaintPlaster => PathKind::LwP,
            },
            segments: vec![
                Segment {
                    medium: MediumRole::Paint,
                    length: h_tx / cos_c,
                },
                Segment {
                    medium: interface.outer_role(),
                    length: run,
                },
                Segment {
                    medium: MediumRole::Paint,
                    length: h_rx / cos_c,
                },
            ],
            interface: Some(interface),
            incidence_rad: Some(theta_c),
            horizontal: placement.horizontal,
        })
    }

    /// Geometry for one specific path kind.
    pub fn path(&self, placement: &Placement<S>, kind: PathKind) -> Result<PathGeometry<S>> {
        match kind {
            PathKind::Dw => self.direct_path(placement),
            PathKind::RwA => self.reflected_path(placement, Interface::AirPaint),
            PathKind::RwP => self.reflected_path(placement, Interface::PaintPlaster),
            PathKind::LwA => self.lateral_path(placement, Interface::AirPaint),
            PathKind::LwP => self.lateral_path(placement, Interface::PaintPlaster),
        }
    }

    /// All geometrically feasible paths for a placement, in canonical kind
    /// order. Lateral paths that do not exist (no critical angle, or nodes
    /// too close) are silently omitted; the three always-present paths are
    /// not.
    pub fn feasible_paths(&self, placement: &Placement<S>) -> Result<Vec<PathGeometry<S>>> {
        let mut paths = vec![
            self.direct_path(placement)?,
            self.reflected_path(placement, Interface::AirPaint)?,
            self.reflected_path(placement, Interface::PaintPlaster)?,
        ];
        for interface in [Interface::AirPaint, Interface::PaintPlaster] {
            match self.lateral_path(placement, interface) {
                Ok(path) => paths.push(path),
                Err(Error::NoCriticalAngle { .. }) | Err(Error::InfeasibleLateralPath { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(paths)
    }

    /// Normal offsets of the two nodes from an interface.
    fn offsets_to(&self, interface: Interface, placement: &Placement<S>) -> (S, S) {
        match interface {
            Interface::AirPaint => (placement.depth_tx, placement.depth_rx),
            Interface::PaintPlaster => (
                self.thickness - placement.depth_tx,
                self.thickness - placement.depth_rx,
            ),
        }
    }
}

/// Transmitter/receiver placement inside the paint layer.
///
/// Depths are measured downward from the air-paint interface; `horizontal`
/// is the in-plane separation of the two nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement<S = f64> {
    pub depth_tx: S,
    pub depth_rx: S,
    pub horizontal: S,
}

impl<S: Scalar> Placement<S> {
    /// Build a placement. Depths must be positive (the upper bound is
    /// checked against a concrete stack) and the horizontal separation
    /// strictly positive.
    pub fn new(depth_tx: S, depth_rx: S, horizontal: S) -> Result<Self> {
        for (label, v) in [
            ("transmitter depth", depth_tx),
            ("receiver depth", depth_rx),
        ] {
            if !(v > S::zero()) || !v.is_finite() {
                return Err(Error::InvalidPlacement(format!(
                    "{label} must be positive and finite, got {v}"
                )));
            }
        }
        if !(horizontal > S::zero()) || !horizontal.is_finite() {
            return Err(Error::InvalidPlacement(format!(
                "horizontal separation must be positive and finite, got {horizontal}"
            )));
        }
        Ok(Self {
            depth_tx,
            depth_rx,
            horizontal,
        })
    }

    /// The same link seen from the other end.
    pub fn swapped(self) -> Self {
        Self {
            depth_tx: self.depth_rx,
            depth_rx: self.depth_tx,
            horizontal: self.horizontal,
        }
    }
}

/// Critical angle (rad, from the normal) for a ray in the denser medium
/// meeting an interface with the rarer one.
pub fn critical_angle<S: Scalar>(n_dense: S, n_rare: S) -> Result<S> {
    if !(n_dense > n_rare) {
        return Err(Error::NoCriticalAngle {
            n_dense: n_dense.to_f64().unwrap_or(f64::NAN),
            n_rare: n_rare.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((n_rare / n_dense).asin())
}

// ---------------------------------------------------------------------------
// Path geometry
// ---------------------------------------------------------------------------

/// One straight piece of a path through a single medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<S = f64> {
    pub medium: MediumRole,
    pub length: S,
}

/// Slant/run decomposition of a lateral path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralParts<S = f64> {
    /// Critical-angle slant from the transmitter to the interface.
    pub slant_tx: S,
    /// Run along the interface inside the rarer medium.
    pub interface_run: S,
    /// Critical-angle slant from the interface to the receiver.
    pub slant_rx: S,
}

/// Complete geometry of one ray path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGeometry<S = f64> {
    kind: PathKind,
    segments: Vec<Segment<S>>,
    interface: Option<Interface>,
    incidence_rad: Option<S>,
    horizontal: S,
}

impl<S: Scalar> PathGeometry<S> {
    pub fn kind(&self) -> PathKind {
        self.kind
    }

    /// Segments in transmitter-to-receiver order.
    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    /// Interface this path interacts with (`None` for the direct wave).
    pub fn interface(&self) -> Option<Interface> {
        self.interface
    }

    /// Angle from the normal at the involved interface: the specular
    /// incidence for reflected waves, the critical angle for lateral ones.
    pub fn incidence_rad(&self) -> Option<S> {
        self.incidence_rad
    }

    /// Horizontal separation of the two endpoints.
    pub fn horizontal(&self) -> S {
        self.horizontal
    }

    /// Total geometric length of all segments.
    pub fn total_length(&self) -> S {
        self.segments
            .iter()
            .fold(S::zero(), |acc, s| acc + s.length)
    }

    /// Length through a given medium.
    pub fn length_in(&self, role: MediumRole) -> S {
        self.segments
            .iter()
            .filter(|s| s.medium == role)
            .fold(S::zero(), |acc, s| acc + s.length)
    }

    /// Slant/run decomposition, present only for lateral paths.
    pub fn lateral_parts(&self) -> Option<LateralParts<S>> {
        match self.kind {
            PathKind::LwA | PathKind::LwP => Some(LateralParts {
                slant_tx: self.segments[0].length,
                interface_run: self.segments[1].length,
                slant_rx: self.segments[2].length,
            }),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::MaterialDb;

    fn standard_stack(thickness: f64) -> LayerStack<f64> {
        let db = MaterialDb::<f64>::with_presets();
        LayerStack::new(
            db.get("air").unwrap().clone(),
            db.get("titanium-white-paint").unwrap().clone(),
            db.get("plaster").unwrap().clone(),
            thickness,
        )
        .unwrap()
    }

    #[test]
    fn direct_path_length_matches_hand_value() {
        let stack = standard_stack(2.0e-3);
        let p = Placement::new(1.5e-3, 0.5e-3, 1.0e-2).unwrap();
        let dw = stack.direct_path(&p).unwrap();
        // sqrt((1 cm)^2 + (1 mm)^2) = 10.0499 mm.
        assert!((dw.total_length() - 1.00499e-2).abs() < 1e-7);
        assert_eq!(dw.kind(), PathKind::Dw);
        assert_eq!(dw.segments().len(), 1);
        assert_eq!(dw.length_in(MediumRole::Paint), dw.total_length());
        assert!(dw.interface().is_none());
    }

    #[test]
    fn reflected_path_mirror_length_and_incidence() {
        let stack = standard_stack(2.0e-3);
        let p = Placement::new(1.0e-3, 1.0e-3, 1.0e-2).unwrap();
        let rw = stack.reflected_path(&p, Interface::AirPaint).unwrap();
        // Mirror image: sqrt((1 cm)^2 + (2 mm)^2) = 10.198 mm.
        assert!((rw.total_length() - 1.019804e-2).abs() < 1e-7);
        // Grazing bounce: atan(10/2) = 78.69 deg.
        let incidence = rw.incidence_rad().unwrap();
        assert!((incidence - 5.0_f64.atan()).abs() < 1e-12);
        // Equal depths split the mirror length evenly.
        let segs = rw.segments();
        assert_eq!(segs.len(), 2);
        assert!((segs[0].length - segs[1].length).abs() < 1e-15);

        // Bottom bounce at mid-layer mirrors the top one.
        let rw_p = stack.reflected_path(&p, Interface::PaintPlaster).unwrap();
        assert!((rw_p.total_length() - rw.total_length()).abs() < 1e-15);
        assert_eq!(rw_p.kind(), PathKind::RwP);
    }

    #[test]
    fn lateral_path_slants_and_run_match_hand_values() {
        let stack = standard_stack(2.0e-3);
        let p = Placement::new(1.0e-3, 1.0e-3, 1.0e-2).unwrap();

        // Air side: critical angle asin(1/2.13) = 28.0014 deg.
        let lw_a = stack.lateral_path(&p, Interface::AirPaint).unwrap();
        let parts = lw_a.lateral_parts().unwrap();
        assert!((parts.slant_tx - 1.1325782e-3).abs() < 1e-9);
        assert!((parts.slant_rx - parts.slant_tx).abs() < 1e-15);
        assert!((parts.interface_run - 8.9365463e-3).abs() < 1e-9);
        assert_eq!(lw_a.segments()[1].medium, MediumRole::Air);
        assert!(
            (lw_a.incidence_rad().unwrap() - (1.0_f64 / 2.13).asin()).abs() < 1e-12
        );
        // Decomposition reassembles the horizontal separation.
        let theta = lw_a.incidence_rad().unwrap();
        let rebuilt = (parts.slant_tx + parts.slant_rx) * theta.sin() + parts.interface_run;
        assert!((rebuilt - p.horizontal).abs() < 1e-12);

        // Plaster side: asin(1.73/2.13) = 54.31 deg, steeper slants.
        let lw_p = stack.lateral_path(&p, Interface::PaintPlaster).unwrap();
        let parts_p = lw_p.lateral_parts().unwrap();
        assert!((parts_p.slant_tx - 1.7141782e-3).abs() < 1e-9);
        assert_eq!(lw_p.segments()[1].medium, MediumRole::Plaster);
        assert!(parts_p.interface_run < parts.interface_run);
    }

    #[test]
    fn lateral_path_requires_room_for_the_slants() {
        let stack = standard_stack(2.0e-3);
        // Plaster-side slants at mid-layer need ~2.78 mm of horizontal room.
        let p = Placement::new(1.0e-3, 1.0e-3, 2.0e-3).unwrap();
        match stack.lateral_path(&p, Interface::PaintPlaster) {
            Err(Error::InfeasibleLateralPath { interface_run_m }) => {
                assert!(interface_run_m <= 0.0);
            }
            other => panic!("expected infeasible lateral path, got {other:?}"),
        }
        // The air-side slants are shallower and still fit.
        assert!(stack.lateral_path(&p, Interface::AirPaint).is_ok());
    }

    #[test]
    fn uniform_stack_has_no_lateral_waves_but_keeps_three_paths() {
        let db = MaterialDb::<f64>::with_presets();
        let air = db.get("air").unwrap().clone();
        let uniform = LayerStack::new(air.clone(), air.clone(), air, 2.0e-3).unwrap();
        let p = Placement::new(1.0e-3, 1.0e-3, 1.0e-2).unwrap();
        assert!(matches!(
            uniform.lateral_path(&p, Interface::AirPaint),
            Err(Error::NoCriticalAngle { .. })
        ));
        let paths = uniform.feasible_paths(&p).unwrap();
        assert_eq!(paths.len(), 3);
    }

    #[test]
    fn feasible_paths_come_back_in_canonical_order() {
        let stack = standard_stack(2.0e-3);
        let p = Placement::new(1.0e-3, 1.0e-3, 1.0e-2).unwrap();
        let kinds: Vec<_> = stack
            .feasible_paths(&p)
            .unwrap()
            .iter()
            .map(|g| g.kind())
            .collect();
        assert_eq!(
            kinds,
            vec![
                PathKind::Dw,
                PathKind::RwA,
                PathKind::RwP,
                PathKind::LwA,
                PathKind::LwP
            ]
        );
        let mut sorted = kinds.clone();
        sorted.sort();
        assert_eq!(kinds, sorted);
    }

    #[test]
    fn path_lengths_are_reciprocal() {
        let stack = standard_stack(2.0e-3);
        let p = Placement::new(0.3e-3, 1.6e-3, 2.0e-2).unwrap();
        let q = p.swapped();
        for (a, b) in stack
            .feasible_paths(&p)
            .unwrap()
            .iter()
            .zip(stack.feasible_paths(&q).unwrap().iter())
        {
            assert_eq!(a.kind(), b.kind());
            assert!((a.total_length() - b.total_length()).abs() < 1e-15);
            assert!((a.length_in(MediumRole::Paint) - b.length_in(MediumRole::Paint)).abs() < 1e-15);
        }
    }

    #[test]
    fn placement_and_stack_validation_reject_degenerate_inputs() {
        assert!(Placement::new(0.0, 1.0e-3, 1.0e-2_f64).is_err());
        assert!(Placement::new(1.0e-3, 1.0e-3, 0.0_f64).is_err());
        assert!(Placement::new(1.0e-3, 1.0e-3, f64::NAN).is_err());

        let stack = standard_stack(2.0e-3);
        // Depth on or past the bottom interface is rejected against a stack.
        let too_deep = Placement::new(2.0e-3, 1.0e-3, 1.0e-2).unwrap();
        assert!(stack.validate_placement(&too_deep).is_err());
        assert!(stack.direct_path(&too_deep).is_err());

        let db = MaterialDb::<f64>::with_presets();
        assert!(LayerStack::new(
            db.get("air").unwrap().clone(),
            db.get("titanium-white-paint").unwrap().clone(),
            db.get("plaster").unwrap().clone(),
            0.0,
        )
        .is_err());
    }

    #[test]
    fn critical_angle_matches_snell() {
        let theta: f64 = critical_angle(2.13, 1.0).unwrap();
        assert!((theta.to_degrees() - 28.0014).abs() < 1e-3);
        let theta_p: f64 = critical_angle(2.13, 1.73).unwrap();
        assert!((theta_p.to_degrees() - 54.3128).abs() < 1e-3);
        assert!(critical_angle(1.0, 1.0_f64).is_err());
        assert!(critical_angle(1.0, 1.5_f64).is_err());
    }
}

use std::collections::BTreeMap;

use super::config::{CheckKind, Control, Scenario};
use super::report::Measurement;
use crate::error::Result;
use crate::gauss::GaussianVector;
use crate::lie::{lie_compat_residual, Group, GroupFunction, GroupGrid, Involution, LieCompatOptions, LieDirection, UnitaryModel};
use crate::C64;

/// Box half-widths and grid spacing used when the scenario leaves them open.
pub fn default_box(group: Group) -> ([f64; 2], f64) {
    match group {
        Group::Line => ([4.0, 0.0], 0.05),
        Group::Affine => ([1.6, 3.0], 0.05),
    }
}

/// Five smooth compactly supported bumps well inside the box.
fn bumps(group: Group, grid: GroupGrid) -> Result<Vec<GroupFunction>> {
    let specs: [([f64; 2], [f64; 2], C64); 5] = match group {
        Group::Line => [
            ([0.1, 0.0], [1.2, 0.0], C64::new(1.0, 0.0)),
            ([-0.3, 0.0], [1.1, 0.0], C64::new(0.5, 0.5)),
            ([0.2, 0.0], [1.3, 0.0], C64::new(0.0, 1.0)),
            ([0.0, 0.0], [1.0, 0.0], C64::new(0.8, -0.6)),
            ([-0.1, 0.0], [1.2, 0.0], C64::new(-0.4, 0.3)),
        ],
        Group::Affine => [
            ([0.1, -0.1], [0.5, 0.6], C64::new(1.0, 0.0)),
            ([-0.1, 0.1], [0.45, 0.6], C64::new(0.5, 0.5)),
            ([0.0, 0.2], [0.5, 0.5], C64::new(0.0, 1.0)),
            ([0.15, 0.0], [0.45, 0.55], C64::new(0.8, -0.6)),
            ([-0.15, -0.15], [0.45, 0.5], C64::new(-0.4, 0.3)),
        ],
    };
    specs.iter().map(|(c, r, k)| GroupFunction::bump(group, grid, *c, *r, *k)).collect()
}

fn packets() -> [GaussianVector; 3] {
    [GaussianVector::packet(0.3, 1.2, 0.2), GaussianVector::packet(-0.4, 1.0, -0.1), GaussianVector::packet(0.0, 1.4, 0.3)]
}

fn directions(s: &Scenario) -> Result<Vec<(String, LieDirection)>> {
    if s.direction == "all" {
        return Ok(s.group.lie_basis().iter().map(|n| (n.to_string(), s.group.direction(n).expect("basis name"))).collect());
    }
    Ok(vec![(s.direction.clone(), s.group.direction(&s.direction)?)])
}

pub(crate) fn run(s: &Scenario) -> Result<BTreeMap<CheckKind, Measurement>> {
    let want = |k: CheckKind| s.checks.iter().any(|c| c.kind == k);
    let (dhalf, dh) = default_box(s.group);
    let half = match s.disc.half[..] {
        [a] => [a, dhalf[1]],
        [a, b] => [a, b],
        _ => dhalf,
    };
    let h = s.disc.h.unwrap_or(dh);
    let dirs = directions(s)?;
    let coarse = GroupGrid::with_spacing(s.group, half, h)?;
    let fine = GroupGrid::with_spacing(s.group, half, h / 2.0)?;
    let count = s.disc.samples.clamp(2, 5);
    let fam_fine = bumps(s.group, fine)?;
    let mut out = BTreeMap::new();

    if want(CheckKind::LieCompat) || want(CheckKind::Refinement) {
        let opts = LieCompatOptions {
            involution: if s.control == Control::DropModular { Involution::DropModular } else { Involution::Modular },
            ..Default::default()
        };
        let fam_coarse = bumps(s.group, coarse)?;
        let pairs = (count - 1).min(2);
        let (mut compat, mut refine) = (Measurement::default(), Measurement::default());
        for (name, xi) in &dirs {
            for i in 0..pairs {
                let r_fine = lie_compat_residual(*xi, &fam_fine[i], &fam_fine[i + 1], &opts)?;
                let r_coarse = lie_compat_residual(*xi, &fam_coarse[i], &fam_coarse[i + 1], &opts)?;
                compat.push(format!("{name}/{i}"), r_fine);
                refine.push(format!("{name}/{i}"), if r_fine == 0.0 { f64::INFINITY } else { r_coarse / r_fine });
            }
        }
        let note = format!("grid spacing {} refined from {h}", h / 2.0);
        out.insert(CheckKind::LieCompat, compat.with_note(note));
        // on the line the residual sits at roundoff on both grids
        if s.group == Group::Affine {
            out.insert(CheckKind::Refinement, refine);
        }
    }
    if want(CheckKind::Garding) {
        let model = UnitaryModel::new(s.group, 8.0, 801)?;
        let mut m = Measurement::default();
        for (name, xi) in &dirs {
            for (i, a) in fam_fine.iter().take(count).enumerate() {
                for (j, p) in packets().iter().take(s.disc.vectors.clamp(1, 3)).enumerate() {
                    let phi = |x: f64| p.eval(x);
                    m.push(format!("{name}/a{i}/phi{j}"), model.du_identity_residual(*xi, a, &phi, None)?);
                }
            }
        }
        out.insert(CheckKind::Garding, m);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::config::ActionKind;

    fn s3(group: Group) -> Scenario {
        let mut s = Scenario::new("s3", ActionKind::Lie);
        s.group = group;
        s.direction = "all".into();
        s.disc.samples = 2;
        s.disc.vectors = 1;
        for k in ActionKind::Lie.supported_checks() {
            s = s.with_check(*k, k.default_tol());
        }
        s
    }

    #[test]
    fn line_scenario() {
        let m = run(&s3(Group::Line)).unwrap();
        assert!(m[&CheckKind::LieCompat].worst(false) <= 1e-10);
        assert!(m[&CheckKind::Garding].worst(false) <= 1e-5);
    }

    #[test]
    fn affine_scenario_and_control() {
        let mut s = s3(Group::Affine);
        let m = run(&s).unwrap();
        assert!(m[&CheckKind::LieCompat].worst(false) <= 1e-4);
        assert!(m[&CheckKind::Refinement].worst(true) >= 4.0);
        assert!(m[&CheckKind::Garding].worst(false) <= 1e-4);
        s.control = Control::DropModular;
        s.direction = "scale".into();
        s.checks.retain(|c| c.kind == CheckKind::LieCompat);
        let m = run(&s).unwrap();
        assert!(m[&CheckKind::LieCompat].worst(false) >= 1e-2);
    }
}

//! Acceptance gate: one test per frozen criterion, each printing a single
//! PASS/FAIL line with the observed extremes.
//!
//! Tolerances are pinned locally on purpose. The library's `tol` constants
//! may move with implementation detail; the numbers here are the contract
//! and must not drift with them.

use std::time::{Duration, Instant};

use isopar::clifford_core::{CliffordSystem, ProductDiscriminant, Variant};
use isopar::curvature_spectra::{
    classify_harmonic_stability, principal_spectrum, sigma_certificate, verify_ricci,
    StabilityVerdict,
};
use isopar::focal_harmonic::{
    eigenmap_check, fiber_check, kg_ratio, pushforward, tension_normality, FocalMap, FocalMapKind,
};
use isopar::foliation_manifolds::{frames, residual, sample, ManifoldId, SamplePoint, SignTag};
use isopar::intrinsic_calculus::{chain_function_identities, mean_curvature_amb};
use isopar::linalg;
use isopar::munzner_forms::verify_munzner_pde;
use isopar::spectral_estimation::{
    estimate_sphere_spectrum, first_cluster_size, verify_explicit_eigenfunctions,
    verify_spectral_inequalities, GraphSpec, InequalityVerdict,
};

/// The four standard verification systems: the smallest family, the smallest
/// multi-operator family, and both (4, 2) families.
fn smoke_systems() -> Vec<CliffordSystem> {
    vec![
        CliffordSystem::build(1, 3, Variant::Standard).unwrap(),
        CliffordSystem::build(2, 2, Variant::Standard).unwrap(),
        CliffordSystem::build(4, 2, Variant::QuaternionSame).unwrap(),
        CliffordSystem::build(4, 2, Variant::QuaternionOpposite).unwrap(),
    ]
}

fn sys_label(sys: &CliffordSystem) -> String {
    format!("(m={},l={},{})", sys.m, sys.l, sys.variant)
}

fn conclude(criterion: &str, ok: bool, detail: String) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("{criterion} {status}: {detail}");
    assert!(ok, "{criterion} {status}: {detail}");
}

/// Norm of the component of `v` along an orthonormal frame.
fn frame_component_norm(v: &[f64], frame: &[Vec<f64>]) -> f64 {
    frame
        .iter()
        .map(|e| linalg::dot(v, e).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Deterministic unit tangent probes at a sample point: a frame vector, the
/// normalized frame sum, and an unevenly weighted alternating combination.
fn tangent_probes(p: &SamplePoint) -> Vec<Vec<f64>> {
    let n = p.coords.len();
    let dim = p.tangent.len() as f64;
    let mut probes = vec![p.tangent[0].clone()];
    let mut sum = vec![0.0; n];
    for e in &p.tangent {
        linalg::axpy(&mut sum, 1.0, e);
    }
    linalg::normalize(&mut sum);
    probes.push(sum);
    let mut alt = vec![0.0; n];
    for (j, e) in p.tangent.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        linalg::axpy(&mut alt, sign * (1.0 + j as f64 / dim), e);
    }
    linalg::normalize(&mut alt);
    probes.push(alt);
    probes
}

#[test]
fn criterion_01_exact_clifford_relations() {
    let configs = [
        (1, 3, Variant::Standard),
        (2, 2, Variant::Standard),
        (3, 1, Variant::Standard),
        (4, 2, Variant::QuaternionSame),
        (4, 2, Variant::QuaternionOpposite),
        (5, 1, Variant::Standard),
    ];
    let start = Instant::now();
    for (m, k, variant) in configs {
        let sys = CliffordSystem::build(m, k, variant)
            .unwrap_or_else(|e| panic!("build ({m},{k},{variant}): {e}"));
        sys.validate()
            .unwrap_or_else(|e| panic!("relations ({m},{k},{variant}): {e}"));
    }
    let elapsed = start.elapsed();
    let ok = elapsed < Duration::from_secs(5);
    conclude(
        "criterion 01 (exact Clifford relations)",
        ok,
        format!("6 systems validated in integer arithmetic, zero tolerance, {elapsed:.2?} (budget 5s)"),
    );
}

#[test]
fn criterion_02_quartic_pdes() {
    let mut worst: f64 = 0.0;
    for sys in smoke_systems() {
        let rep = verify_munzner_pde(&sys, 1000, 101).unwrap();
        worst = worst
            .max(rep.max_rel_gradient_identity)
            .max(rep.max_rel_laplace_identity);
    }
    let ok = worst <= 1e-9;
    conclude(
        "criterion 02 (quartic gradient and Laplace identities)",
        ok,
        format!("max relative error {worst:.3e} over 4 systems x 1000 points (tolerance 1e-9)"),
    );
}

#[test]
fn criterion_03_chain_function_identities() {
    let mut worst: f64 = 0.0;
    let mut functions = 0usize;
    for sys in smoke_systems() {
        for rep in chain_function_identities(&sys, 500, 103).unwrap() {
            worst = worst.max(rep.max_gradient_rel).max(rep.max_laplace_rel);
            functions += 1;
        }
    }
    let ok = worst <= 1e-6;
    conclude(
        "criterion 03 (chain gradient and Laplace identities)",
        ok,
        format!(
            "{functions} chain functions at 500 samples each, max relative error {worst:.3e} (tolerance 1e-6)"
        ),
    );
}

#[test]
fn criterion_04_shape_operator_spectra() {
    const LEVELS: [f64; 5] = [-0.9, -0.5, 0.0, 0.5, 0.9];
    let mut worst: f64 = 0.0;
    let mut mismatches = 0usize;
    let mut spectra = 0usize;
    for sys in smoke_systems() {
        let mut ids = Vec::new();
        for &c in &LEVELS {
            for i in 0..sys.m {
                ids.push(ManifoldId::LevelU { i, c });
            }
            for i in 2..=sys.m {
                ids.push(ManifoldId::LevelV { i, c });
            }
        }
        for id in ids {
            for p in sample(&sys, id, 2, 107).unwrap() {
                let rep = principal_spectrum(&sys, id, &p.coords).unwrap();
                worst = worst.max(rep.max_value_residual);
                mismatches += rep.multiplicity_mismatches;
                spectra += 1;
            }
        }
    }
    let ok = worst <= 1e-8 && mismatches == 0;
    conclude(
        "criterion 04 (principal curvature spectra)",
        ok,
        format!(
            "{spectra} spectra, max eigenvalue residual {worst:.3e} (tolerance 1e-8), {mismatches} multiplicity mismatches"
        ),
    );
}

#[test]
fn criterion_05_minimal_sequence() {
    let samples = 200;
    let mut worst_sphere: f64 = 0.0;
    let mut worst_descending: f64 = 0.0;
    let mut worst_ascending: f64 = 0.0;
    for sys in smoke_systems() {
        // each descending chain member in the round sphere
        for i in 0..=sys.m {
            let id = ManifoldId::M(i);
            for p in sample(&sys, id, samples, 109).unwrap() {
                let h = mean_curvature_amb(&sys, id, &p.coords, &p.tangent).unwrap();
                let radial = linalg::dot(&h, &p.coords);
                let sphere_tangent = linalg::add_scaled(&h, -radial, &p.coords);
                worst_sphere = worst_sphere.max(linalg::norm(&sphere_tangent));
            }
        }
        // each descending member inside every coarser one
        for d in 1..=sys.m {
            let id = ManifoldId::M(d);
            for p in sample(&sys, id, samples, 113 + d as u64).unwrap() {
                let h = mean_curvature_amb(&sys, id, &p.coords, &p.tangent).unwrap();
                for i in 0..d {
                    let coarse = ManifoldId::M(i);
                    assert!(residual(&sys, coarse, &p.coords) <= 1e-10, "chain nesting");
                    let (tan, _) = frames(&sys, coarse, &p.coords).unwrap();
                    worst_descending = worst_descending.max(frame_component_norm(&h, &tan));
                }
            }
        }
        // each ascending member inside every finer one
        for i in 1..sys.m {
            let id = ManifoldId::N(i);
            for p in sample(&sys, id, samples, 127 + i as u64).unwrap() {
                let h = mean_curvature_amb(&sys, id, &p.coords, &p.tangent).unwrap();
                for j in (i + 1)..=sys.m {
                    let fine = ManifoldId::N(j);
                    assert!(residual(&sys, fine, &p.coords) <= 1e-10, "chain nesting");
                    let (tan, _) = frames(&sys, fine, &p.coords).unwrap();
                    worst_ascending = worst_ascending.max(frame_component_norm(&h, &tan));
                }
            }
        }
    }
    let worst = worst_sphere.max(worst_descending).max(worst_ascending);
    let ok = worst <= 1e-7;
    conclude(
        "criterion 05 (minimal sequence)",
        ok,
        format!(
            "tangential mean curvature at 200 samples: sphere {worst_sphere:.3e}, descending pairs {worst_descending:.3e}, ascending pairs {worst_ascending:.3e} (tolerance 1e-7)"
        ),
    );
}

#[test]
fn criterion_06_pushforward_and_quadrature() {
    let mut worst_push: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut pushes = 0usize;
    let mut ratios = 0usize;
    for sys in smoke_systems() {
        let mut maps = Vec::new();
        for i in 0..sys.m {
            maps.push(FocalMap::new(&sys, FocalMapKind::PhiT { i, t: 0.31 }).unwrap());
            maps.push(FocalMap::new(&sys, FocalMapKind::PhiT { i, t: -0.17 }).unwrap());
        }
        for i in 2..=sys.m {
            maps.push(FocalMap::new(&sys, FocalMapKind::PsiT { i, t: 0.27 }).unwrap());
            maps.push(FocalMap::new(&sys, FocalMapKind::PsiT { i, t: -0.12 }).unwrap());
        }
        for map in &maps {
            for p in sample(&sys, map.source, 10, 131).unwrap() {
                for probe in tangent_probes(&p) {
                    let push = pushforward(&sys, map, &p.coords, &probe).unwrap();
                    worst_push = worst_push
                        .max(push.scaling_residual)
                        .max(push.decomposition_residual)
                        .max(push.target_tangency);
                    pushes += 1;
                }
            }
        }
        for i in 0..sys.m {
            if sys.l as i64 - i as i64 - 3 > 0 {
                let got = kg_ratio(&sys, i).unwrap();
                let want = (sys.l - i - 2) as f64 / (sys.l - i - 3) as f64;
                worst_ratio = worst_ratio.max((got - want).abs() / want);
                ratios += 1;
            }
        }
    }
    let ok = worst_push <= 1e-9 && worst_ratio <= 1e-6;
    conclude(
        "criterion 06 (pushforward scaling and quadrature ratio)",
        ok,
        format!(
            "{pushes} pushforwards, worst residual {worst_push:.3e} (tolerance 1e-9); {ratios} quadrature ratios, worst relative error {worst_ratio:.3e} (tolerance 1e-6)"
        ),
    );
}

#[test]
fn criterion_07_fiber_geometry() {
    let mut worst: f64 = 0.0;
    let mut dims_ok = true;
    let mut fibers = 0usize;
    for sys in smoke_systems() {
        let mut maps: Vec<(FocalMap, usize)> = Vec::new();
        for i in 0..sys.m {
            for sign in [SignTag::Plus, SignTag::Minus] {
                let map = FocalMap::new(&sys, FocalMapKind::PhiQuarter { i, sign }).unwrap();
                maps.push((map, sys.l - i - 2));
            }
        }
        for i in 2..=sys.m {
            for sign in [SignTag::Plus, SignTag::Minus] {
                let map = FocalMap::new(&sys, FocalMapKind::PsiQuarter { i, sign }).unwrap();
                maps.push((map, i - 1));
            }
        }
        for (map, want_dim) in &maps {
            for y in sample(&sys, map.target, 5, 137).unwrap() {
                let rep = fiber_check(&sys, map, &y.coords, 50, 139).unwrap();
                dims_ok &= rep.fiber_dim == *want_dim;
                worst = worst
                    .max(rep.max_source_residual)
                    .max(rep.max_map_defect)
                    .max(rep.max_model_residual)
                    .max(rep.max_tangential_acceleration)
                    .max(rep.max_normal_identity_residual);
                fibers += 1;
            }
        }
    }
    let ok = dims_ok && worst <= 1e-8;
    conclude(
        "criterion 07 (fiber dimension, sphere model, geodesy)",
        ok,
        format!(
            "{fibers} fibers at 50 samples over 5 base points each, dimensions {}, worst residual {worst:.3e} (tolerance 1e-8)",
            if dims_ok { "as predicted" } else { "WRONG" }
        ),
    );
}

#[test]
fn criterion_08_eigenmaps() {
    let mut worst: f64 = 0.0;
    let mut worst_image: f64 = 0.0;
    let mut lambda_ok = true;
    let mut maps = 0usize;
    for sys in smoke_systems() {
        for i in 0..sys.m {
            for sign in [SignTag::Plus, SignTag::Minus] {
                let map = FocalMap::new(&sys, FocalMapKind::PhiQuarter { i, sign }).unwrap();
                let rep = eigenmap_check(&sys, &map, 200, 149).unwrap();
                lambda_ok &= rep.eigenvalue == (2 * sys.l - i - 3) as f64;
                worst = worst.max(rep.max_rel_residual);
                worst_image = worst_image.max(rep.max_image_norm_defect);
                maps += 1;
            }
        }
        for i in 2..=sys.m {
            for sign in [SignTag::Plus, SignTag::Minus] {
                let map = FocalMap::new(&sys, FocalMapKind::PsiQuarter { i, sign }).unwrap();
                let rep = eigenmap_check(&sys, &map, 200, 151).unwrap();
                lambda_ok &= rep.eigenvalue == (sys.l + i - 2) as f64;
                worst = worst.max(rep.max_rel_residual);
                worst_image = worst_image.max(rep.max_image_norm_defect);
                maps += 1;
            }
        }
    }
    let ok = lambda_ok && worst <= 1e-6;
    conclude(
        "criterion 08 (quarter-turn eigenmaps)",
        ok,
        format!(
            "{maps} maps at 200 samples, eigenvalues {}, max relative residual {worst:.3e} (tolerance 1e-6), image norm defect {worst_image:.3e}",
            if lambda_ok { "match the closed forms" } else { "WRONG" }
        ),
    );
}

#[test]
fn criterion_09_tension_normality() {
    let mut worst_tangential: f64 = 0.0;
    let mut worst_target: f64 = 0.0;
    let mut maps = 0usize;
    for sys in smoke_systems() {
        let mut coeffs = vec![0.0; sys.m + 1];
        coeffs[0] = 1.0;
        let mut kinds = Vec::new();
        for i in 0..sys.m {
            for sign in [SignTag::Plus, SignTag::Minus] {
                kinds.push(FocalMapKind::PhiQuarter { i, sign });
            }
        }
        for i in 2..=sys.m {
            for sign in [SignTag::Plus, SignTag::Minus] {
                kinds.push(FocalMapKind::PsiQuarter { i, sign });
            }
        }
        kinds.push(FocalMapKind::PlusToMinus { coeffs: coeffs.clone() });
        kinds.push(FocalMapKind::PlusToHypersurface { coeffs, t: 0.3 });
        kinds.push(FocalMapKind::HypersurfaceToPlus { t: 0.3 });
        kinds.push(FocalMapKind::HypersurfaceToMinus { t: 0.3 });
        if sys.extension_op().is_some() {
            kinds.push(FocalMapKind::MinusToPlus);
            kinds.push(FocalMapKind::MinusToHypersurface { s: 0.2 });
        }
        for kind in kinds {
            let map = FocalMap::new(&sys, kind).unwrap();
            let rep = tension_normality(&sys, &map, 200, 157).unwrap();
            worst_tangential = worst_tangential.max(rep.max_tangential);
            worst_target = worst_target.max(rep.max_target_residual);
            maps += 1;
        }
    }
    let ok = worst_tangential <= 1e-6 && worst_target <= 1e-10;
    conclude(
        "criterion 09 (tension field normality)",
        ok,
        format!(
            "{maps} maps at 200 samples, max tangential component {worst_tangential:.3e} (tolerance 1e-6), max target residual {worst_target:.3e} (tolerance 1e-10)"
        ),
    );
}

#[test]
fn criterion_10_extremal_curvature_certificates() {
    let mut ok = true;
    let mut lines = Vec::new();
    for sys in smoke_systems() {
        let start = Instant::now();
        let plus = sigma_certificate(&sys, SignTag::Plus, 8, 4, 163).unwrap();
        let minus = sigma_certificate(&sys, SignTag::Minus, 8, 4, 167).unwrap();
        let elapsed = start.elapsed();
        let sys_ok = plus.sigma_hat >= 1.0 - 1e-4
            && plus.sigma_hat <= 1.0 + 1e-6
            && plus.witness_dir_on_opposite <= 1e-6
            && plus.min_value <= 1e-6
            && plus.identity_max_residual <= 1e-10
            && minus.sigma_hat >= 1.0 - 1e-2
            && minus.sigma_hat <= 1.0 + 1e-3
            && elapsed < Duration::from_secs(120);
        ok &= sys_ok;
        lines.push(format!(
            "{} sigma+ {:.9} (witness on opposite {:.1e}, min {:.1e}, identity {:.1e}), sigma- {:.4}, {:.1?}",
            sys_label(&sys),
            plus.sigma_hat,
            plus.witness_dir_on_opposite,
            plus.min_value,
            plus.identity_max_residual,
            minus.sigma_hat,
            elapsed,
        ));
    }
    conclude(
        "criterion 10 (extremal normal curvature certificates)",
        ok,
        format!("budget 120s per system; {}", lines.join("; ")),
    );
}

#[test]
fn criterion_11_exact_focal_eigenfunctions() {
    let same = CliffordSystem::build(4, 2, Variant::QuaternionSame).unwrap();
    let opp = CliffordSystem::build(4, 2, Variant::QuaternionOpposite).unwrap();
    let rep_same = verify_explicit_eigenfunctions(&same, 200, 173).unwrap();
    let rep_opp = verify_explicit_eigenfunctions(&opp, 200, 173).unwrap();
    let quadratic = rep_opp.quadratic_max_rel.unwrap_or(f64::INFINITY);
    let discriminants_ok = same.product_discriminant != ProductDiscriminant::NotScalar
        && opp.product_discriminant == ProductDiscriminant::NotScalar;
    let ok = quadratic <= 1e-6
        && rep_opp.coordinate_max_rel <= 1e-6
        && rep_same.coordinate_max_rel <= 1e-6
        && rep_same.quadratic_max_rel.is_none()
        && discriminants_ok
        && rep_opp.certified.is_some()
        && rep_same.not_verifiable.is_some();
    conclude(
        "criterion 11 (exact focal eigenfunctions)",
        ok,
        format!(
            "quadratic eigenfunctions (eigenvalue 12) rel {quadratic:.3e}, coordinates (eigenvalue 10) rel {:.3e}/{:.3e} at 200 samples (tolerance 1e-6); product discriminants {}; homogeneous-family top eigenvalue reported not verifiable by design",
            rep_opp.coordinate_max_rel,
            rep_same.coordinate_max_rel,
            if discriminants_ok { "separate the families" } else { "WRONG" },
        ),
    );
}

#[test]
fn criterion_12_spectral_estimates() {
    let start = Instant::now();
    let spec = GraphSpec {
        n_points: 4000,
        k_neighbors: 24,
        bandwidth_scale: 1.0,
        seed: 179,
    };
    let cal = estimate_sphere_spectrum(2, &spec, 5).unwrap();
    let cal_rel = (cal.eigenvalues[0] - 2.0).abs() / 2.0;
    let cluster = first_cluster_size(&cal.eigenvalues, 0.15);
    let cal_ok = cal_rel <= 0.12 && cluster == 3;

    let mut inequalities_ok = true;
    let mut verdicts = Vec::new();
    for k in [3usize, 4] {
        let sys = CliffordSystem::build(1, k, Variant::Standard).unwrap();
        let max_dim = if sys.l >= 4 { 2 * sys.l - 2 } else { 2 * sys.l - 3 };
        let budget = GraphSpec::desk_default(max_dim, 181 + k as u64);
        let checks = verify_spectral_inequalities(&sys, 0, &budget).unwrap();
        let mut passes = 0usize;
        for c in &checks {
            match c.verdict {
                InequalityVerdict::EstimatePass => passes += 1,
                InequalityVerdict::EstimateFail => inequalities_ok = false,
                InequalityVerdict::NotApplicable => {}
            }
            verdicts.push(format!("l={} {} {:?}", sys.l, c.label, c.verdict));
        }
        inequalities_ok &= passes >= 1;
    }
    let elapsed = start.elapsed();
    let ok = cal_ok && inequalities_ok && elapsed < Duration::from_secs(600);
    conclude(
        "criterion 12 (spectral estimates; ESTIMATE, not proof)",
        ok,
        format!(
            "sphere calibration rel {cal_rel:.3} (tolerance 0.12), first cluster {cluster} (want 3); {}; {elapsed:.1?} (budget 600s)",
            verdicts.join(", "),
        ),
    );
}

#[test]
fn criterion_13_ricci_and_stability() {
    let mut worst: f64 = 0.0;
    let mut homogeneous: Option<(f64, f64)> = None;
    for sys in smoke_systems() {
        let rep = verify_ricci(&sys, 100, 191).unwrap();
        worst = worst.max(rep.max_route_disagreement);
        if sys.variant == Variant::QuaternionSame {
            homogeneous = Some((rep.min_value, rep.max_value));
        }
    }
    let (h_min, h_max) = homogeneous.unwrap();
    let homogeneous_ok = (h_min - 6.0).abs() <= 1e-6 && (h_max - 6.0).abs() <= 1e-6;

    let expected: [(usize, usize, Variant, StabilityVerdict); 10] = [
        (1, 3, Variant::Standard, StabilityVerdict::NotHarmonicallyUnstable),
        (1, 4, Variant::Standard, StabilityVerdict::NotHarmonicallyUnstable),
        (2, 2, Variant::Standard, StabilityVerdict::NotHarmonicallyUnstable),
        (2, 3, Variant::Standard, StabilityVerdict::Undetermined),
        (3, 2, Variant::Standard, StabilityVerdict::HarmonicallyUnstable),
        (4, 2, Variant::QuaternionSame, StabilityVerdict::HarmonicallyUnstable),
        (4, 2, Variant::QuaternionOpposite, StabilityVerdict::Undetermined),
        (5, 1, Variant::Standard, StabilityVerdict::NotHarmonicallyUnstable),
        (6, 1, Variant::Standard, StabilityVerdict::NotHarmonicallyUnstable),
        (9, 1, Variant::Standard, StabilityVerdict::Undetermined),
    ];
    let mut table_ok = true;
    println!("  m1  m2  variant     verdict");
    for (m, k, variant, want) in expected {
        let sys = CliffordSystem::build(m, k, variant).unwrap();
        let c = classify_harmonic_stability(&sys).unwrap();
        println!(
            "  {:>2}  {:>2}  {:<10}  {:?}: {}",
            c.m1, c.m2, variant.to_string(), c.verdict, c.reason
        );
        table_ok &= c.verdict == want;
    }

    let ok = worst <= 1e-6 && homogeneous_ok && table_ok;
    conclude(
        "criterion 13 (Ricci agreement and stability table)",
        ok,
        format!(
            "max route disagreement {worst:.3e} at 100 pairs (tolerance 1e-6); homogeneous (4,2) Ricci range [{h_min:.9}, {h_max:.9}] (want constant 6); classification table {}",
            if table_ok { "matches" } else { "WRONG" },
        ),
    );
}

use surfrev_core::catalog::{build, closed_form_k, list_entries, Params};
use surfrev_core::fd::{fd_oracle, Vals};
use surfrev_core::geometry::PointGeometry;
use surfrev_core::lorentz::{LVec3, Scalar};
use surfrev_core::oracle::{fd_geometry, normal_invariants, scaled_diff, FdEngine, FdSteps};
use surfrev_core::verify::SHRINK;

fn dflt(id: &str) -> surfrev_core::geometry::SurfacePatch {
    build(id, &Params::new()).unwrap()
}

fn at(id: &str, s: f64, t: f64) -> PointGeometry {
    dflt(id).geometry(s, t).unwrap()
}

fn close(a: Scalar, b: f64, tol: f64) -> bool {
    scaled_diff(a, Scalar::new(b, 0.0)) <= tol
}

fn assert_vec(v: &LVec3, want: [f64; 3], tol: f64) {
    for (got, w) in v.into_array().into_iter().zip(want) {
        assert!(close(got, w, tol), "{v:?} vs {want:?}");
    }
}

#[test]
fn rev1_laplacian_of_gauss_map_at_base_point() {
    let g = at("rev1", 0.0, 0.0);
    assert_vec(&g.delta_n, [0.011048543456039773, 0.0, 0.0331456303681193], 1e-12);
    assert!(close(g.k, -1.0 / 32.0, 1e-12));
    assert!(close(g.k_ext, -1.0 / 64.0, 1e-12));
    assert!(close(g.k_int, -1.0 / 64.0, 1e-10));
    assert!(g.residual <= 1e-12);
}

#[test]
fn rev2s_laplacian_follows_the_catalog_normal() {
    // with the reference normal (0, 1, 2)/sqrt(3) the field points along -N
    let g = at("rev2s", 0.0, 1.0);
    let r3 = 1.0 / 3f64.sqrt();
    assert_vec(&g.normal, [0.0, r3, 2.0 * r3], 1e-12);
    assert_vec(&g.delta_n, [0.0, -0.5132, -1.0264], 1e-4);
    assert!(close(g.k, -8.0 / 9.0, 1e-10));
}

#[test]
fn rev3_bilinear_k() {
    let g = at("rev3", 0.0, 1.0);
    assert!(close(g.k, -0.5, 1e-12));
    assert!(g.residual <= 1e-12);
}

#[test]
fn first_form_and_its_derivative() {
    let p = dflt("rev1");
    let f = p.fundamental_forms(0.3, 0.5).unwrap();
    // E = (t+a)^2 - b^2 at a=3, b=1
    assert!(close(f.E, 11.25, 1e-12));
    assert!(close(f.F, 0.0, 1e-12));
    let fd = FdEngine::new(&p, FdSteps::default());
    let de: Vals<3> = fd_oracle(|s, t| fd.metric(s, t), (0.3, 0.5), (0, 1), 1e-3).unwrap();
    assert!(close(de.0[0], 7.0, 1e-6), "{:?}", de.0[0]);
}

#[test]
fn closed_form_k_on_every_revolution_entry() {
    for id in ["rev1", "rev2s", "rev2t", "rev3"] {
        let p = dflt(id);
        let params = p.params.clone();
        let d = p.domain.shrunk(SHRINK);
        for (s, t) in d.grid(5, 7) {
            let Some(want) = closed_form_k(id, &params, t) else { continue };
            let g = p.geometry(s, t).unwrap();
            // the stated k for rev2t has the opposite sign; the verifier flags it
            let got = if id == "rev2t" { -g.k } else { g.k };
            assert!(close(got, want, 1e-9), "{id} ({s}, {t}): {got} vs {want}");
        }
    }
}

// Frozen from the finite-difference oracle (Richardson, steps scaled to the
// patch); the jet engine is checked against them.
#[test]
fn torus_control_fixtures() {
    let g = at("torus_control", 0.5, 0.5);
    assert_vec(&g.delta_n, [62.62003282728389, 34.20947984609271, -91.36544298927397], 1e-6);
    assert!(close(g.mean, -2.273162663114211, 1e-6));
    assert!(close(g.k_ext, -2.465299598266972, 1e-6));
    assert!(close(g.k_ii.unwrap(), 3.7258425942343423, 1e-6));
    assert!(close(g.k, 25.5996733, 1e-6));
    assert!(g.residual > 0.01);

    let g = at("torus_control", 0.0, 0.0);
    assert!(close(g.mean, -0.8, 1e-12));
    assert!(close(g.k_ext, -0.8, 1e-12));
    assert_vec(&g.delta_n, [4.16, 0.0, 0.0], 1e-12);
    assert!(g.residual <= 1e-12);
}

#[test]
fn second_gaussian_curvature_vanishes_on_the_pair() {
    for id in ["rev1", "hel1"] {
        let kii = at(id, 0.3, 0.5).k_ii.unwrap();
        assert!(kii.norm() <= 1e-6, "{id}: {kii}");
    }
}

#[test]
fn pair_fixtures_at_interior_point() {
    let k = -1.0 / 126.5625;
    let rev = at("rev1", 0.3, 0.5);
    let hel = at("hel1", 0.3, 0.5);
    assert!(close(rev.k_ext, k, 1e-9) && close(hel.k_ext, k, 1e-9));
    assert_vec(&rev.delta_n, [0.004500958985630726, 0.0013923097722617391, 0.016489851093331696], 1e-6);
    assert_vec(&hel.delta_n, [-0.0013923097722617474, 0.004500958985630738, -0.01648985109333177], 1e-6);
    assert!(close(rev.k, -0.01580246913580239, 1e-9));
    assert!(close(hel.k, -0.01580246913580239, 1e-9));
}

#[test]
fn jet_and_fd_agree_at_fixture_points() {
    for (id, s, t) in [("torus_control", 0.5, 0.5), ("rev1", 0.3, 0.5), ("hel1", 0.3, 0.5), ("rev2s", 0.2, 1.0)] {
        let p = dflt(id);
        let j = p.geometry(s, t).unwrap();
        let f = fd_geometry(&p, s, t).unwrap();
        for (a, b) in j.delta_n.into_array().into_iter().zip(f.delta_n.into_array()) {
            assert!(scaled_diff(a, b) <= 1e-6, "{id}: {a} vs {b}");
        }
        assert!(scaled_diff(j.mean, f.mean) <= 1e-6);
        assert!(scaled_diff(j.k, f.k) <= 1e-6);
    }
}

#[test]
fn gauss_map_exists_on_every_sweep_point() {
    for e in list_entries() {
        let p = dflt(e.id);
        let d = p.domain.shrunk(SHRINK);
        let mut worst = (0.0f64, 0.0f64);
        for (s, t) in d.grid(64, 64) {
            if p.excluded(s, t).is_some() {
                continue;
            }
            let (unit, ortho) = normal_invariants(&p, s, t).unwrap_or_else(|err| panic!("{} ({s}, {t}): {err}", e.id));
            worst = (worst.0.max(unit), worst.1.max(ortho));
        }
        assert!(worst.0 <= 1e-10 && worst.1 <= 1e-10, "{}: {worst:?}", e.id);
    }
}

#[test]
fn intrinsic_and_extrinsic_curvature_on_space_like_patches() {
    for id in ["rev1", "rev2s", "hel1", "hel2s"] {
        let p = dflt(id);
        for (s, t) in p.domain.shrunk(SHRINK).grid(4, 6) {
            let g = p.geometry(s, t).unwrap();
            assert_eq!(g.epsilon, -1);
            assert!(scaled_diff(g.k_ext, g.k_int) <= 1e-8, "{id} ({s}, {t}): {} vs {}", g.k_ext, g.k_int);
        }
    }
}

#[test]
fn intrinsic_curvature_flips_sign_on_time_like_patches() {
    for id in ["rev2t", "hel2t", "torus_control"] {
        let p = dflt(id);
        for (s, t) in p.domain.shrunk(SHRINK).grid(4, 6) {
            let g = p.geometry(s, t).unwrap();
            assert_eq!(g.epsilon, 1);
            assert!(scaled_diff(g.k_ext, -g.k_int) <= 1e-8, "{id} ({s}, {t}): {} vs {}", g.k_ext, g.k_int);
        }
    }
}

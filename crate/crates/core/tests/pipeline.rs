use weldfrac_core::coupling::{run_case, Defect, FailureMode, PressureSchedule, Scenario, WeldSetup};
use weldfrac_core::fem::Geometry;
use weldfrac_core::io::{read_residual_state, write_residual_state};
use weldfrac_core::materials::Grade;
use weldfrac_core::mesh::pipe::PipeSectionSpec;
use weldfrac_core::mesh::{parse_mesh, write_mesh};

fn coarse() -> PipeSectionSpec {
    PipeSectionSpec {
        half_angle_deg: 8.0,
        radial_divisions: 6,
        fine_half_width: 10.0,
        fine_spacing: 1.0,
        coarse_spacing: 5.0,
        ..Default::default()
    }
}

#[test]
fn mesh_file_keeps_pipe_topology() {
    let m = coarse().generate().unwrap();
    let back = parse_mesh(&write_mesh(&m)).unwrap();
    assert_eq!(back.nodes, m.nodes);
    assert_eq!(back.element_count(), m.element_count());
    assert_eq!(back.region_names(), m.region_names());
    for (name, nodes) in m.node_sets() {
        assert_eq!(back.node_set(name).unwrap(), nodes.as_slice(), "{name}");
    }
    for (name, edges) in m.edge_sets() {
        assert_eq!(back.edge_set(name).unwrap(), edges.as_slice(), "{name}");
    }
}

#[test]
fn material_field_follows_regions() {
    let pipe = coarse();
    let m = pipe.generate().unwrap();
    let g = Geometry::new(&m);
    let sc = Scenario { grade: Grade::X52, length_scale_factor: 4.0, ..Default::default() };
    let field = sc.material_field(&m, &g, &pipe).unwrap();
    let ell = field.ell();
    for e in 0..m.element_count() {
        let (mat, ell_ref) = if m.region_of(e).starts_with("weld") {
            (Grade::X52.weld(), 0.31)
        } else {
            (Grade::X52.base(), 0.40)
        };
        for k in m.quad_points(e) {
            assert_eq!(field.region(k).mech.sigma_y_at(20.0), mat.mech.sigma_y_at(20.0));
            assert!((ell[k] - 4.0 * ell_ref).abs() < 1e-12);
        }
    }
}

#[test]
fn coarse_case_runs_weld_and_pressure_stages() {
    let pipe = coarse();
    let sc = Scenario {
        length_scale_factor: 4.0,
        schedule: PressureSchedule { p_cap: 2.0, ..Default::default() },
        defects: vec![Defect::from_start([-4.0, 0.0], 2.0, 60.0)],
        ..Default::default()
    };
    let out = run_case(&pipe, &sc, &WeldSetup::for_pipe(&pipe)).unwrap();
    let weld = out.weld.as_ref().expect("weld stage ran");
    assert!(weld.residual.sigma.iter().any(|s| s.von_mises() > 10.0));

    let r = &out.pressure.report;
    assert_eq!(r.mode, FailureMode::CapReached);
    assert_eq!(r.p_max, 2.0);
    assert!(r.seeded_nodes > 0);
    assert!(r.mass_closure <= 1e-6, "{}", r.mass_closure);
    assert_eq!(r.increments.len(), 9);
    assert!(r.increments.windows(2).all(|w| w[1].p > w[0].p && w[1].mass_h >= w[0].mass_h - 1e-12));

    // residual state survives the file round trip on the same mesh
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rs.csv");
    write_residual_state(&path, &out.mesh, &weld.residual, "test").unwrap();
    let back = read_residual_state(&path, &out.mesh).unwrap();
    assert_eq!(back.sigma, weld.residual.sigma);
    assert_eq!(back.eps_bar, weld.residual.eps_bar);
}

#[test]
fn defect_outside_the_wall_is_rejected() {
    let pipe = coarse();
    let m = pipe.generate().unwrap();
    let sc = Scenario { defects: vec![Defect::from_start([0.0, 6.5], 3.0, 60.0)], ..Default::default() };
    assert!(sc.seeded_nodes(&m, &pipe).is_err());
}

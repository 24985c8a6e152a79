//! End-to-end acceptance checks. Each test covers one numbered criterion and
//! prints a single [PASS] line (visible with --nocapture); a failure panics,
//! which the harness reports as the matching [FAIL] line.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use cerf_forge::catalog::{
    four_sphere, plain_segment, projective_hexagon_decomposition, projective_plane,
    projective_plane_reversed, projective_sum, s1_cross_s3, standard_trisection,
    toral_hexagon, toral_switch_segment,
};
use cerf_forge::doc::to_canonical_json;
use cerf_forge::family_one::{
    assemble_interval_family, classify_interval, compile_pair_family, interpolate_cut_systems,
    CerfGraphic1, ElementaryInterval, FourManifoldRecord, IntervalType,
};
use cerf_forge::family_two::{assemble_disk_family, permutahedron_edge_types, PolygonDecomposition};
use cerf_forge::invariants::{
    heegaard_h1, trisection_euler_characteristic, trisection_signature, TrisectionDiagram,
};
use cerf_forge::morse::{
    critical_neighborhood, cut_system_from_morse, SlicedMorseFunction,
};
use cerf_forge::ribbon::triple_census;
use cerf_forge::surface::{
    slide, validate_cut_system, CutSystem, HomologyClass, SymplecticLattice,
};
use cerf_forge::Error;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cerf-forge")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn cerf-forge")
}

fn run_ok(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(
        out.status.success(),
        "{:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("report parses as json")
}

fn within(elapsed: Duration, limit: Duration, what: &str) {
    assert!(
        elapsed < limit,
        "{} took {:?}, budget is {:?}",
        what,
        elapsed,
        limit
    );
}

#[test]
fn criterion_01_two_saddle_census_has_four_entries() {
    let start = Instant::now();
    let report = json_of(&run_ok(&["enumerate", "figure1"]));
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1), "enumerate figure1");

    assert_eq!(report["count"], Value::from(4));
    let entries = report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    let genus_zero = entries.iter().filter(|e| e["genus"] == 0).count();
    let genus_one = entries.iter().filter(|e| e["genus"] == 1).count();
    assert_eq!((genus_zero, genus_one), (3, 1));
    println!(
        "[PASS] criterion 01: two-saddle census has 4 entries (3 planar, 1 toral) in {:?}",
        elapsed
    );
}

#[test]
fn criterion_02_triple_census_profiles_and_euler() {
    let start = Instant::now();
    let report = json_of(&run_ok(&["enumerate", "triple"]));
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10), "enumerate triple");

    let entries = report["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    for e in entries {
        let genus = e["genus"].as_i64().unwrap();
        let circles = e["boundary_circles"].as_i64().unwrap();
        assert!(
            (genus, circles) == (0, 5) || (genus, circles) == (1, 3),
            "profile ({}, {}) is not allowed",
            genus,
            circles
        );
        // chi = 2 - 2 genus - boundary circles for a compact surface.
        assert_eq!(2 - 2 * genus - circles, -3);
    }
    println!(
        "[PASS] criterion 02: all {} triple-saddle entries have profile (0,5) or (1,3), chi = -3, in {:?}",
        entries.len(),
        elapsed
    );
}

#[test]
fn criterion_03_hexagon_edge_bound() {
    let start = Instant::now();
    let toral: Vec<_> = triple_census().into_iter().filter(|rn| rn.genus() == 1).collect();
    assert!(!toral.is_empty());
    let orderings =
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut checked = 0usize;
    for rn in &toral {
        for roles in orderings {
            let types = permutahedron_edge_types(rn, roles).unwrap();
            let type1 = types.iter().filter(|&&t| t == IntervalType::Type1).count();
            assert!(
                type1 <= 3,
                "neighborhood {:?} with roles {:?} has {} type-1 edges",
                rn.profile(),
                roles,
                type1
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10), "hexagon edge sweep");
    println!(
        "[PASS] criterion 03: {} hexagon edge assignments all carry at most 3 type-1 edges, in {:?}",
        checked, elapsed
    );
}

#[test]
fn criterion_04_random_functions_have_planar_saddles_and_valid_systems() {
    let start = Instant::now();
    let mut checked_events = 0usize;
    for seed in 0..1000u64 {
        let f = SlicedMorseFunction::random_valid(seed, 30);
        assert!(f.events.len() <= 30);
        let genus = f.genus().expect("generated function is valid");
        for idx in 0..f.events.len() {
            let n = critical_neighborhood(&f, idx).unwrap();
            assert_eq!(n.genus, 0, "seed {} event {} has a non-planar neighborhood", seed, idx);
            checked_events += 1;
        }
        let lattice = SymplecticLattice::new(genus);
        let system = cut_system_from_morse(&f, &lattice, None).unwrap();
        let report = validate_cut_system(&lattice, &system);
        assert!(report.valid(), "seed {}: {}", seed, report.summary());
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10), "random function sweep");
    println!(
        "[PASS] criterion 04: 1000 random functions, {} critical neighborhoods planar, all cut systems valid, in {:?}",
        checked_events, elapsed
    );
}

#[test]
fn criterion_05_standard_g5_k2_pair() {
    let t = standard_trisection(5, 2);
    let lattice = t.lattice();
    let h1 = heegaard_h1(&lattice, &t.alpha, &t.beta).unwrap();
    assert!(h1.is_free_of_rank(2), "alpha/beta splitting has H1 = {}", h1);

    let block = compile_pair_family(&lattice, &t.alpha, &t.beta).unwrap();
    let graphic = CerfGraphic1 { genus: 5, cyclic: false, segments: block.segments.clone() };
    let record = assemble_interval_family(&graphic, &t.alpha).unwrap();
    assert_eq!(record.surgeries.len(), 3);
    assert_eq!(record.k, 2);
    assert!(record.boundary_h1.is_free_of_rank(2));
    println!(
        "[PASS] criterion 05: g=5 k=2 standard pair gives H1 = Z^2 and replays with 3 surgeries, k = 2"
    );
}

#[test]
fn criterion_06_slide_solver_replays_exactly() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total_moves = 0usize;
    for case in 0..500 {
        let g = rng.gen_range(1..=4usize);
        let lattice = SymplecticLattice::new(g);
        let from = CutSystem::new(g, (0..g).map(|i| lattice.a(i)).collect());

        // Target: a product of at most 10 elementary row operations.
        let mut to = from.clone();
        let words = rng.gen_range(0..=10usize);
        for _ in 0..words {
            if g < 2 {
                break;
            }
            let target = rng.gen_range(0..g);
            let mut other = rng.gen_range(0..g);
            while other == target {
                other = rng.gen_range(0..g);
            }
            let coeff: i64 = *[-3, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap();
            let sign = coeff.signum();
            for _ in 0..coeff.abs() {
                to = slide(&to, cerf_forge::surface::SlideMove { target, other, sign }).unwrap();
            }
        }

        let plan = interpolate_cut_systems(&lattice, &from, &to).unwrap();
        assert!(plan.within_bound, "case {} exceeded the move bound", case);
        total_moves += plan.moves.len();

        // Independent replay: the slides must land on the target exactly,
        // up to the reported per-curve signs.
        let mut cur = from.clone();
        for mv in &plan.moves {
            cur = slide(&cur, *mv).unwrap();
        }
        for i in 0..g {
            let expect = if plan.final_signs[i] == 1 {
                to.curves[i].clone()
            } else {
                to.curves[i].neg()
            };
            assert_eq!(cur.curves[i], expect, "case {} curve {} replays wrong", case, i);
        }
    }

    // Span mismatches are rejected, not silently bridged.
    let lattice = SymplecticLattice::new(2);
    let from = CutSystem::new(2, vec![lattice.a(0), lattice.a(1)]);
    let other = CutSystem::new(2, vec![lattice.b(0), lattice.b(1)]);
    assert!(matches!(
        interpolate_cut_systems(&lattice, &from, &other),
        Err(Error::SpanMismatch)
    ));

    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10), "slide solver sweep");
    println!(
        "[PASS] criterion 06: 500 random slide words replay exactly ({} moves emitted), span mismatch rejected, in {:?}",
        total_moves, elapsed
    );
}

#[test]
fn criterion_07_invariant_catalog() {
    let cases: [(&str, TrisectionDiagram, i64, i64); 5] = [
        ("four-sphere", four_sphere(), 2, 0),
        ("projective plane", projective_plane(), 3, 1),
        ("reversed projective plane", projective_plane_reversed(), 3, -1),
        ("circle times three-sphere", s1_cross_s3(), 0, 0),
        ("projective connected sum", projective_sum(), 4, 0),
    ];
    for (name, t, chi, sigma) in cases {
        assert_eq!(trisection_euler_characteristic(&t), chi, "{} euler characteristic", name);
        assert_eq!(trisection_signature(&t).unwrap(), sigma, "{} signature", name);
    }
    println!("[PASS] criterion 07: invariant catalog matches on all 5 reference diagrams");
}

#[test]
fn criterion_08_capping_balance() {
    let a = HomologyClass(vec![1, 0]);
    let b = HomologyClass(vec![0, 1]);
    let ab = HomologyClass(vec![1, 1]);

    // Negative hexagon capping the standard projective plane: sigma = +1.
    let plus = projective_hexagon_decomposition();
    let r = assemble_disk_family(&plus).unwrap();
    assert!(r.boundary_closes);
    let (p, q) = (r.positive_triples as i64, r.negative_triples as i64);
    assert_eq!((p, q), (0, 1));
    assert_eq!(r.boundary_signature, Some(q - p));
    assert_eq!(r.signature_balanced, Some(true));

    // Positive hexagon capping the reversed plane: sigma = -1.
    let minus = PolygonDecomposition {
        genus: 1,
        polygons: vec![toral_hexagon([a.clone(), ab, b])],
        gluings: vec![],
        start_system: CutSystem::new(1, vec![a]),
        boundary_trisection: Some(projective_plane_reversed()),
    };
    let r = assemble_disk_family(&minus).unwrap();
    assert!(r.boundary_closes);
    let (p, q) = (r.positive_triples as i64, r.negative_triples as i64);
    assert_eq!((p, q), (1, 0));
    assert_eq!(r.boundary_signature, Some(q - p));
    assert_eq!(r.signature_balanced, Some(true));

    println!(
        "[PASS] criterion 08: capping balance holds; (p,q) = (0,1) for sigma +1 and (1,0) for sigma -1"
    );
}

#[test]
fn criterion_09_type0_subdivision_is_invisible() {
    // A type 0 segment splits into itself plus a trailing eventless segment.
    fn split_at(gr: &CerfGraphic1, i: usize) -> CerfGraphic1 {
        let mut segments = gr.segments.clone();
        let filler = ElementaryInterval::eventless(&segments[i].end);
        segments.insert(i + 1, filler);
        CerfGraphic1 { genus: gr.genus, cyclic: gr.cyclic, segments }
    }
    fn record_bytes(gr: &CerfGraphic1, start: &CutSystem) -> String {
        let record: FourManifoldRecord = assemble_interval_family(gr, start).unwrap();
        to_canonical_json(&record)
    }

    // Hand-built toral family: plain, switch, plain.
    let base = CerfGraphic1 {
        genus: 1,
        cyclic: false,
        segments: vec![
            plain_segment(1),
            toral_switch_segment(HomologyClass(vec![1, 0]), HomologyClass(vec![0, 1])),
            plain_segment(1),
        ],
    };
    let start = CutSystem::new(1, vec![HomologyClass(vec![1, 0])]);
    let reference = record_bytes(&base, &start);
    let mut splits = 0usize;
    for i in 0..base.segments.len() {
        if classify_interval(&base.segments[i]).unwrap() == IntervalType::Type0 {
            assert_eq!(record_bytes(&split_at(&base, i), &start), reference, "split at {}", i);
            splits += 1;
        }
    }
    assert!(splits >= 2);

    // Compiled genus-3 family with a slid starting listing, so the graphic
    // carries slide segments (type 0 with slide data) as well as switches.
    let t = standard_trisection(3, 1);
    let lattice = t.lattice();
    let mut slid = t.alpha.clone();
    for mv in [
        cerf_forge::surface::SlideMove { target: 1, other: 2, sign: 1 },
        cerf_forge::surface::SlideMove { target: 0, other: 1, sign: -1 },
    ] {
        slid = slide(&slid, mv).unwrap();
    }
    let block = compile_pair_family(&lattice, &slid, &t.beta).unwrap();
    let base = CerfGraphic1 { genus: 3, cyclic: false, segments: block.segments };
    let reference = record_bytes(&base, &slid);
    let before = splits;
    for i in 0..base.segments.len() {
        if classify_interval(&base.segments[i]).unwrap() == IntervalType::Type0 {
            assert_eq!(record_bytes(&split_at(&base, i), &slid), reference, "split at {}", i);
            splits += 1;
        }
    }
    assert!(splits > before, "compiled family carried no type-0 segments to split");
    println!(
        "[PASS] criterion 09: {} type-0 subdivisions left the four-manifold record byte-identical",
        splits
    );
}

#[test]
fn criterion_10_cli_reports_are_deterministic() {
    let dir = std::env::temp_dir().join("cerf_forge_acceptance");
    std::fs::create_dir_all(&dir).unwrap();

    // Derived inputs for the graphic and decomposition commands.
    let family_path = dir.join("compiled_family.json");
    let family = run_ok(&["compile-trisection", fixture("cp2.json").to_str().unwrap()]);
    std::fs::write(&family_path, &family).unwrap();
    let dec_path = dir.join("hexagon.json");
    let dec_doc = cerf_forge::doc::Document::Decomposition(projective_hexagon_decomposition());
    std::fs::write(&dec_path, cerf_forge::doc::serialize_document(&dec_doc)).unwrap();
    let interval_path = dir.join("interval_family.json");
    let interval_doc = cerf_forge::doc::Document::Graphic1 {
        graphic: CerfGraphic1 {
            genus: 1,
            cyclic: false,
            segments: vec![
                plain_segment(1),
                toral_switch_segment(HomologyClass(vec![1, 0]), HomologyClass(vec![0, 1])),
                plain_segment(1),
            ],
        },
        start_system: CutSystem::new(1, vec![HomologyClass(vec![1, 0])]),
    };
    std::fs::write(&interval_path, cerf_forge::doc::serialize_document(&interval_doc)).unwrap();

    let family = family_path.to_str().unwrap();
    let dec = dec_path.to_str().unwrap();
    let interval = interval_path.to_str().unwrap();
    let fixtures: Vec<(Vec<String>, &str)> = vec![
        (vec!["enumerate".into(), "figure1".into()], "enumerate figure1"),
        (vec!["enumerate".into(), "triple".into()], "enumerate triple"),
        (vec!["render".into(), family.into()], "render graphic"),
        (vec!["render".into(), dec.into()], "render decomposition"),
        (vec!["classify-interval".into(), family.into()], "classify-interval"),
        (vec!["assemble-s1".into(), family.into()], "assemble-s1"),
        (vec!["classify-polygon".into(), dec.into()], "classify-polygon"),
        (vec!["assemble-b2".into(), dec.into()], "assemble-b2"),
        (vec!["assemble-b1".into(), interval.into()], "assemble-b1"),
        (vec!["render".into(), interval.into()], "render interval family"),
        (
            vec![
                "interpolate".into(),
                fixture("surface_from.json").to_str().unwrap().into(),
                fixture("surface_to.json").to_str().unwrap().into(),
            ],
            "interpolate",
        ),
    ];
    let mut commands: Vec<(Vec<String>, String)> = fixtures
        .into_iter()
        .map(|(args, label)| (args, label.to_string()))
        .collect();
    for f in [
        "cp2.json",
        "cp2bar.json",
        "s4.json",
        "s1s3.json",
        "cp2_sum.json",
        "stdgk_g5k2.json",
    ] {
        let path = fixture(f).to_str().unwrap().to_string();
        commands.push((vec!["validate".into(), path.clone()], format!("validate {}", f)));
        commands.push((vec!["invariants".into(), path.clone()], format!("invariants {}", f)));
        commands.push((
            vec!["compile-trisection".into(), path.clone()],
            format!("compile-trisection {}", f),
        ));
    }
    for f in ["sphere_morse.json", "torus_morse.json", "genus2_morse.json"] {
        let path = fixture(f).to_str().unwrap().to_string();
        commands.push((vec!["reeb".into(), path.clone()], format!("reeb {}", f)));
        commands.push((vec!["cut-system".into(), path.clone()], format!("cut-system {}", f)));
    }

    for (args, label) in &commands {
        let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let first = run_ok(&argv);
        let second = run_ok(&argv);
        assert_eq!(first, second, "{} is not byte-deterministic", label);
        assert!(!first.is_empty(), "{} wrote nothing", label);
    }
    std::fs::remove_file(&family_path).ok();
    std::fs::remove_file(&dec_path).ok();
    std::fs::remove_file(&interval_path).ok();
    println!(
        "[PASS] criterion 10: {} command invocations byte-identical across two runs",
        commands.len()
    );
}

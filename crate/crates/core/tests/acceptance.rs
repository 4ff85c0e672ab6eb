//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its runtime (visible with `--nocapture`). Tolerances are pinned in
//! the assertions.

use std::time::{Duration, Instant};

use secdiff::{
    characteristic_roots, classify, difference_orbit, evaluate_all, make_certificate,
    oscillation_band, probe_conjecture, recurrence_residual, simulate, simulate_difference,
    verify_certificate_on_orbit, ClassifyParams, Conjecture, Family, InitialConditions, Kind,
    LimitBehavior, NonlinearitySpec, Oscillation, Range, RatioChoice, RootMode, SimulationGuards,
    SweepConfig, SystemSpec, Termination, TheoremId,
};

use secdiff::criteria::{c1_holds, thm2_holds, thm3_holds};
use secdiff::rng::SplitMix64;
use secdiff::sweep::write_json;

fn sys(c: f64, f: NonlinearitySpec) -> SystemSpec {
    SystemSpec::new(c, f).unwrap()
}

fn pass(n: usize, what: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "criterion {n} overran its {budget:?} budget: took {elapsed:?}"
    );
    println!("ACCEPTANCE {n}: PASS ({elapsed:.2?}) - {what}");
}

/// Varied catalog draw whose orbits stay bounded from [-10, 10]^2 seeds.
fn random_instance(rng: &mut SplitMix64) -> (SystemSpec, f64, f64) {
    let c = rng.uniform(0.0, 0.9);
    let a = rng.uniform(0.05, 0.9 * (1.0 + c) / 2.0);
    let kind = match rng.next_u64() % 7 {
        0 => Kind::ScaledTanh { a },
        1 => Kind::LinearNegative { a },
        2 => Kind::LinearPositive { a },
        3 => Kind::Ramp { a },
        4 => Kind::BoundedSaturating { a, cap: rng.uniform(0.5, 3.0) },
        5 => Kind::SublinearPower { lambda: rng.uniform(0.2, 0.8) },
        _ => Kind::PiecewiseLinear {
            nodes: vec![(-2.0, 2.0 * a), (0.0, 0.0), (1.0, -0.5 * a)],
        },
    };
    let spec = sys(c, NonlinearitySpec::new(kind).unwrap());
    (spec, rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0))
}

/// 1. The first-difference transform of a simulated x-orbit satisfies the
///    difference recursion to 1e-12, and seeding the difference recursion
///    with y2 = (c-1) x1 + f(y1) reproduces it elementwise to 1e-12, over
///    at least 100 random instances.
#[test]
fn acceptance_1_difference_transform_equivalence() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0101);
    for trial in 0..120 {
        let (spec, x0, x1) = random_instance(&mut rng);
        let gx = SimulationGuards {
            horizon: 401,
            convergence_tol: 1e-300,
            ..Default::default()
        };
        let x = simulate(&spec, x0, x1, &gx).unwrap();
        let y = difference_orbit(&x).unwrap();
        let residual = recurrence_residual(&y).unwrap();
        assert!(residual <= 1e-12, "trial {trial}: forward residual {residual:e}");

        let y1 = x1 - x0;
        let y2 = (spec.c() - 1.0) * x1 + spec.nonlinearity().evaluate(y1);
        let gy = SimulationGuards { horizon: 400, ..gx };
        let reseeded = simulate_difference(&spec, y1, y2, &gy).unwrap();
        // Orbits that underflow to exact zeros may fill the convergence
        // window one step apart on the two recursions; compare the overlap.
        let overlap = y.len().min(reseeded.len());
        assert!(
            y.len().abs_diff(reseeded.len()) <= 1 && overlap >= 50,
            "trial {trial}: lengths {} vs {}",
            y.len(),
            reseeded.len()
        );
        for i in 0..overlap {
            let (a, b) = (y.values()[i], reseeded.values()[i]);
            assert!(
                (a - b).abs() <= 1e-12,
                "trial {trial}: element {i} differs: {a} vs {b}"
            );
        }
    }
    pass(
        1,
        "difference transform round trip on 120 random instances",
        started,
        Duration::from_secs(5),
    );
}

/// 2. For 50 random (a, c) with a < (1+c)/2 and sector-bounded kinds,
///    midpoint certificates satisfy dV <= -A y^2 + 1e-10 along every
///    simulated orbit, and every orbit from [-10, 10]^2 reaches
///    |x| <= 1e-6 before the 100000-step horizon.
#[test]
fn acceptance_2_sector_certificates_verify_and_orbits_converge() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0202);
    for inst in 0..50 {
        let c = rng.uniform(0.0, 0.95);
        let a = rng.uniform(0.05, 0.98 * (1.0 + c) / 2.0);
        let f: NonlinearitySpec = match inst % 3 {
            0 => format!("tanh:a={a}").parse().unwrap(),
            1 => format!("linneg:a={a}").parse().unwrap(),
            _ => format!("pwl:(-2,{});(0,0);(1,{})", 2.0 * a, -0.5 * a).parse().unwrap(),
        };
        assert_eq!(f.properties().sector_bound, a, "inst {inst}: sector bound drift");
        let spec = sys(c, f);
        let cert = make_certificate(a, c, TheoremId::SectorBounded, RatioChoice::Midpoint)
            .unwrap_or_else(|e| panic!("inst {inst}: {e}"));
        assert!(cert.decrease_constant > 0.0);

        let guards = SimulationGuards { convergence_tol: 1e-6, ..Default::default() };
        let mut seeds = vec![
            (-10.0, -10.0),
            (-10.0, 0.0),
            (-10.0, 10.0),
            (0.0, -10.0),
            (0.0, 10.0),
            (10.0, -10.0),
            (10.0, 0.0),
            (10.0, 10.0),
            (0.0, 0.0),
        ];
        seeds.push((rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)));
        seeds.push((rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)));
        for (x0, x1) in seeds {
            let orbit = simulate(&spec, x0, x1, &guards).unwrap();
            assert_eq!(
                orbit.termination(),
                Termination::Converged,
                "inst {inst}: orbit from ({x0}, {x1}) did not reach 1e-6 before the horizon"
            );
            let report = verify_certificate_on_orbit(&cert, &orbit, 1e-10).unwrap();
            assert!(
                report.verified,
                "inst {inst}: decrease violated at {:?} (excess {:e})",
                report.first_violation, report.max_excess
            );
        }
    }
    pass(
        2,
        "midpoint certificates verified on 50 random instances, all orbits converged",
        started,
        Duration::from_secs(30),
    );
}

/// 3. Sharpness at the sector threshold: at a = (1+c)/2 the linear
///    negative feedback has characteristic root exactly -1 (residual
///    <= 1e-12), and 0.05 past the threshold simulation diverges.
#[test]
fn acceptance_3_sharpness_at_the_sector_threshold() {
    let started = Instant::now();
    for c in [0.0, 0.25, 0.5, 0.75, 0.9] {
        let a = (1.0 + c) / 2.0;
        let roots = characteristic_roots(RootMode::LinearNegative { a }, c);
        let nearest = roots
            .roots
            .iter()
            .map(|r| (r.re + 1.0).abs().max(r.im.abs()))
            .fold(f64::MAX, f64::min);
        assert!(nearest <= 1e-12, "c={c}: no root at -1, off by {nearest:e}");
        for r in roots.roots {
            let poly_re = r.re * r.re - r.im * r.im - (c - a) * r.re - a;
            let poly_im = 2.0 * r.re * r.im - (c - a) * r.im;
            assert!(poly_re.hypot(poly_im) <= 1e-12, "c={c}: root residual");
        }

        let f: NonlinearitySpec = format!("linneg:a={}", a + 0.05).parse().unwrap();
        let orbit = simulate(&sys(c, f), 0.0, 1.0, &SimulationGuards::default()).unwrap();
        assert_eq!(
            orbit.termination(),
            Termination::Diverged,
            "c={c}: past-threshold orbit must trip the divergence guard"
        );
    }
    pass(
        3,
        "root -1 at a = (1+c)/2 and guard-tripping divergence 0.05 past it",
        started,
        Duration::from_secs(5),
    );
}

/// 4. Nonnegative-form constants at c = 0.5: the condition holds at
///    a = 1.05 and fails at a = 1.06 (bracketing the cubic root), and the
///    weight window at (a, c) = (1, 0.5) is (2/3, 3/4) to 1e-12.
#[test]
fn acceptance_4_nonnegative_form_constants() {
    let started = Instant::now();
    assert!(thm3_holds(1.05, 0.5), "a = 1.05 must satisfy the condition at c = 0.5");
    assert!(!thm3_holds(1.06, 0.5), "a = 1.06 must violate the condition at c = 0.5");

    let (lo, hi) = secdiff::window_thm3(1.0, 0.5).unwrap();
    assert!((lo - 2.0 / 3.0).abs() <= 1e-12, "window lo {lo}");
    assert!((hi - 0.75).abs() <= 1e-12, "window hi {hi}");
    pass(
        4,
        "condition brackets the cubic root at c = 0.5; window (2/3, 3/4)",
        started,
        Duration::from_secs(5),
    );
}

/// 5. Oscillation threshold sharpness for the tanh neuron at c = 0.75:
///    slope 0.30 makes every sampled orbit oscillatory, slope 0.20 makes
///    every sampled orbit nonoscillatory with the one-signed-decay
///    signature; the band floor is exactly 0.25.
#[test]
fn acceptance_5_tanh_neuron_oscillation_threshold() {
    let started = Instant::now();
    assert_eq!(oscillation_band(0.75).0, 0.25);

    let mut rng = SplitMix64::new(0x0505);
    let mut seeds = Vec::new();
    for &x0 in &[-10.0, -3.0, 3.0, 10.0] {
        for &x1 in &[-10.0, -3.0, 3.0, 10.0] {
            seeds.push((x0, x1));
        }
    }
    for _ in 0..4 {
        seeds.push((rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)));
    }

    let params = ClassifyParams::default();
    for (a, expect_osc) in [(0.30, true), (0.20, false)] {
        let f: NonlinearitySpec = format!("tanh:a={a}").parse().unwrap();
        let spec = sys(0.75, f);
        for &(x0, x1) in &seeds {
            let orbit = simulate(&spec, x0, x1, &SimulationGuards::default()).unwrap();
            let verdict = classify(&orbit, &params);
            if expect_osc {
                assert_eq!(
                    verdict.oscillation,
                    Oscillation::Oscillatory,
                    "a={a} from ({x0}, {x1}): {} sign changes",
                    verdict.sign_changes
                );
            } else {
                assert_eq!(
                    verdict.oscillation,
                    Oscillation::Nonoscillatory,
                    "a={a} from ({x0}, {x1})"
                );
                assert_eq!(verdict.lemma1_holds, Some(true), "a={a} from ({x0}, {x1})");
                assert_eq!(verdict.limit_behavior, LimitBehavior::ConvergesToZero);
            }
        }
    }
    pass(
        5,
        "tanh c = 0.75: slope 0.30 oscillates, 0.20 decays one-signed, floor = 0.25",
        started,
        Duration::from_secs(10),
    );
}

/// 6. Divergent slope at zero forces oscillation: the sublinear kind
///    classifies oscillatory at every sampled damping and seed.
#[test]
fn acceptance_6_sublinear_oscillates_everywhere() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(0x0606);
    let params = ClassifyParams::default();
    for c in [0.0, 0.25, 0.5, 0.75, 0.9] {
        let f: NonlinearitySpec = "sublinear:lambda=0.5".parse().unwrap();
        let spec = sys(c, f);
        let report = evaluate_all(&spec);
        assert_eq!(report.summary, secdiff::Summary::ProvenOscillatory, "c={c}");

        let mut seeds = vec![(-10.0, -3.0), (3.0, 10.0), (-7.0, 7.0), (1.0, -1.0)];
        for _ in 0..3 {
            seeds.push((rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)));
        }
        for (x0, x1) in seeds {
            let orbit = simulate(&spec, x0, x1, &SimulationGuards::default()).unwrap();
            let verdict = classify(&orbit, &params);
            assert_eq!(
                verdict.oscillation,
                Oscillation::Oscillatory,
                "c={c} from ({x0}, {x1}): {} sign changes",
                verdict.sign_changes
            );
        }
    }
    pass(
        6,
        "sublinear kind oscillatory at every sampled c and seed",
        started,
        Duration::from_secs(30),
    );
}

/// 7. Band identities to 1e-12 on 1000 damping samples, and the region
///    inclusions C1 => THM2 (everywhere) and THM2 => THM3 (a <= 1) hold on
///    a 200 x 200 grid with zero exceptions.
#[test]
fn acceptance_7_band_identities_and_region_inclusions() {
    let started = Instant::now();
    for i in 0..1000 {
        let c = 0.999 * i as f64 / 999.0;
        let (lo, hi) = oscillation_band(c);
        assert!((lo * hi - c * c).abs() <= 1e-12, "product identity at c={c}");
        assert!((lo + hi - 2.0 * (2.0 - c)).abs() <= 1e-12, "sum identity at c={c}");
    }

    let mut exceptions = 0;
    for i in 0..200 {
        for j in 0..200 {
            let a = 0.004 + 1.994 * i as f64 / 199.0;
            let c = 0.996 * j as f64 / 199.0;
            if c1_holds(a, c) && !thm2_holds(a, c) {
                exceptions += 1;
            }
            if a <= 1.0 && thm2_holds(a, c) && !thm3_holds(a, c) {
                exceptions += 1;
            }
        }
    }
    assert_eq!(exceptions, 0, "region inclusion exceptions on the 200x200 grid");
    pass(
        7,
        "band identities on 1000 samples; inclusions exception-free on 200x200",
        started,
        Duration::from_secs(5),
    );
}

/// 8. Conjecture-probe regression: the nonnegative-feedback probe at the
///    gap cell a = 0.95, c = 0.2 finds no counterexample under the default
///    sampling with a fixed seed, and the run is byte-reproducible.
#[test]
fn acceptance_8_conjecture_probe_regression() {
    let started = Instant::now();
    let cfg = SweepConfig {
        a_range: Range { lo: 0.95, hi: 0.95, steps: 2 },
        c_range: Range { lo: 0.2, hi: 0.2, steps: 2 },
        family: Family::Ramp,
        initial_conditions: InitialConditions { seed: 42, ..Default::default() },
        guards: SimulationGuards::default(),
        parallelism: 0,
    };
    let report = probe_conjecture(Conjecture::Two, &cfg).unwrap();
    assert_eq!(report.cells_probed, 4, "the a = 0.95, c = 0.2 cell sits in the gap");
    assert_eq!(report.orbits_run, 4 * 45, "default sampling is 25 grid + 20 random");
    assert!(
        !report.counterexample_found,
        "unexpected candidates: {:?}",
        report.candidates
    );

    let again = probe_conjecture(Conjecture::Two, &cfg).unwrap();
    let mut bytes_first = Vec::new();
    let mut bytes_again = Vec::new();
    write_json(&report, &mut bytes_first).unwrap();
    write_json(&again, &mut bytes_again).unwrap();
    assert_eq!(bytes_first, bytes_again, "probe output must be byte-reproducible");
    pass(
        8,
        "no counterexample at the gap cell; output byte-reproducible",
        started,
        Duration::from_secs(60),
    );
}

use proptest::prelude::*;

use linstab::harness::config::Config;
use linstab::harness::contour::{enclosed_area, extract_zero_contour};
use linstab::harness::csv::num;
use linstab::harness::pnm;
use linstab::problems::ammc::ammc_problem;
use linstab::problems::inpaint::{
    gradient_image, run_inpaint, text_mask, vandalize, Image, InpaintTask, Model,
};
use linstab::problems::mcm::{mcm_problem, sphere, Dumbbell};
use linstab::problems::ScalarTest;
use linstab::steppers::{reference_solve, Stepper};
use linstab::{Field, Grid, Scheme};

#[test]
fn mcm_max_principle_at_large_steps() {
    let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[48, 48]).unwrap();
    let db = Dumbbell {
        center: [0.0; 3],
        radius: 0.4,
        offset: 0.45,
        neck: 0.15,
    };
    let u0 = db.level_set(&g);
    let (lo, hi) = u0.values().iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    for s in [Scheme::Sbdf1, Scheme::Etdrk2] {
        let prob = mcm_problem(u0.clone(), s.pbar_min(), 0.05).unwrap();
        let explicit = prob.explicit_dt.unwrap();
        for mult in [1.0, 10.0, 100.0] {
            let dt = mult * explicit;
            let mut st = Stepper::new(&prob, s, dt, 0.0, u0.values()).unwrap();
            for _ in 0..20 {
                st.step().unwrap();
                for &v in st.solution() {
                    assert!(v <= hi + 1e-8 && v >= lo - 1e-8, "{s} dt = {mult} x explicit: {v}");
                }
            }
        }
    }
}

#[test]
fn split_leaves_the_equation_unchanged() {
    let a = ammc_problem(64, 0.1, 0.5).unwrap();
    let b = ammc_problem(64, 0.1, 3.0).unwrap();
    let u = a.initial.clone();
    assert_eq!(a.eval_rhs(0.1, &u).unwrap().values(), b.eval_rhs(0.1, &u).unwrap().values());
    let ra = reference_solve(&a, u.values(), 0.0, 0.05, 400).unwrap();
    let rb = reference_solve(&b, u.values(), 0.0, 0.05, 400).unwrap();
    assert_eq!(ra, rb);
    // Different p change the error constant but not the limit.
    let run = |p: f64, n: usize| {
        let prob = ammc_problem(64, 0.1, p).unwrap();
        let mut st = Stepper::new(&prob, Scheme::Sbdf2, 0.05 / n as f64, 0.0, u.values()).unwrap();
        st.run_to(0.05).unwrap();
        st.solution().to_vec()
    };
    let gap = |n: usize| {
        run(1.0, n).iter().zip(run(2.0, n)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let (g1, g2) = (gap(20), gap(40));
    assert!(g2 < g1 / 3.0, "{g1:e} {g2:e}");
}

fn tv_energy(img: &Image, clean_mask: &[bool], f: &Image, eps: f64, lambda0: f64) -> f64 {
    let (w, h) = (img.width, img.height);
    let mut e = 0.0;
    for (c, u) in img.channels.iter().enumerate() {
        for j in 0..h {
            for i in 0..w {
                let k = j * w + i;
                let ux = if i + 1 < w { u[k + 1] - u[k] } else { 0.0 };
                let uy = if j + 1 < h { u[k + w] - u[k] } else { 0.0 };
                e += (ux * ux + uy * uy + eps * eps).sqrt();
                if clean_mask[k] {
                    e += 0.5 * lambda0 * (u[k] - f.channels[c][k]).powi(2);
                }
            }
        }
    }
    e
}

#[test]
fn tv_inpainting_lowers_energy_and_keeps_known_pixels() {
    let clean = gradient_image(40, 40);
    let mask = text_mask(40, 40, 3);
    let dirty = vandalize(&clean, &mask, 1.0);
    let task = InpaintTask::new(&dirty, &mask, Model::Tv, 0.88, 2e-3).unwrap();
    let out = run_inpaint(&task, Scheme::Sbdf1, 2000).unwrap();
    assert!(out.converged);
    let known: Vec<bool> = mask.iter().map(|m| !m).collect();
    let e0 = tv_energy(&dirty, &known, &dirty, task.eps, task.lambda0);
    let e1 = tv_energy(&out.image, &known, &dirty, task.eps, task.lambda0);
    assert!(e1 < e0, "{e0} -> {e1}");
    for c in 0..3 {
        for k in (0..40 * 40).filter(|&k| known[k]) {
            assert!((out.image.channels[c][k] - dirty.channels[c][k]).abs() < 0.05);
        }
    }
}

#[test]
fn tvh1_inpainting_restores_gradient() {
    let clean = gradient_image(32, 32);
    let mask = text_mask(32, 32, 11);
    let dirty = vandalize(&clean, &mask, 1.0);
    let task = InpaintTask::new(&dirty, &mask, Model::TvH1, 0.08, 1.9e-3).unwrap();
    let out = run_inpaint(&task, Scheme::Sbdf2, 3000).unwrap();
    assert!(out.converged);
    let err = |img: &Image| {
        let mut s = 0.0;
        for c in 0..3 {
            for k in (0..32 * 32).filter(|&k| mask[k]) {
                s += (img.channels[c][k] - clean.channels[c][k]).powi(2);
            }
        }
        s.sqrt()
    };
    assert!(err(&out.image) < 0.25 * err(&dirty));
}

fn run_sequence(s: Scheme, dt: f64, n: usize) -> Vec<f64> {
    let prob = ScalarTest::modified(&[-0.7, -40.0, -3000.0], s.pbar_min().max(1.0));
    let mut st = Stepper::new(&prob, s, dt, 0.0, &[1.0, -0.5, 0.25]).unwrap();
    st.advance(n).unwrap();
    st.solution().to_vec()
}

#[test]
fn runs_are_bitwise_deterministic() {
    for s in Scheme::ALL {
        assert_eq!(run_sequence(s, 0.03, 25), run_sequence(s, 0.03, 25), "{s}");
    }
    let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[32, 32]).unwrap();
    let prob = mcm_problem(sphere(&g, [0.1, 0.0, 0.0], 0.5), 0.5, 0.05).unwrap();
    let go = || {
        let mut st = Stepper::new(&prob, Scheme::Etdrk4, 0.005, 0.0, prob.initial.values()).unwrap();
        st.run_to(0.05).unwrap();
        st.solution().to_vec()
    };
    assert_eq!(go(), go());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_numbers_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        let back: f64 = num(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn config_text_round_trip(entries in proptest::collection::btree_map("[a-z][a-z0-9_]{0,6}", "[a-zA-Z0-9.,+-]{1,10}", 0..8)) {
        let mut cfg = Config::default();
        for (k, v) in &entries {
            cfg.set(k, v);
        }
        let back = Config::parse(&cfg.to_text()).unwrap();
        prop_assert_eq!(back.entries().collect::<Vec<_>>(), cfg.entries().collect::<Vec<_>>());
    }

    #[test]
    fn pnm_round_trip(w in 1usize..9, h in 1usize..9, gray in any::<bool>(), seed in any::<u64>()) {
        let chans = if gray { 1 } else { 3 };
        let mut x = seed;
        let mut next = || { x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (x >> 56) as f64 / 255.0 };
        let img = Image::new(w, h, (0..chans).map(|_| (0..w * h).map(|_| next()).collect()).collect()).unwrap();
        let bytes = pnm::encode(&img).unwrap();
        let back = pnm::decode(&bytes).unwrap();
        prop_assert_eq!(back.channels, img.channels);
    }

    #[test]
    fn contour_area_of_circles(r in 0.2f64..0.8, cx in -0.1f64..0.1, cy in -0.1f64..0.1) {
        let g = Grid::periodic(&[-1.0, -1.0], &[2.0, 2.0], &[96, 96]).unwrap();
        let u = sphere(&g, [cx, cy, 0.0], r);
        let c = extract_zero_contour(&u).unwrap();
        prop_assert_eq!(c.len(), 1);
        prop_assert!(c[0].closed);
        let area = enclosed_area(&c);
        let exact = std::f64::consts::PI * r * r;
        // Inscribed polygon: the deficit shrinks like (h / r)^2.
        prop_assert!((area - exact).abs() < 0.5 * (0.02 / r).powi(2) * exact);
    }

    #[test]
    fn contour_is_sign_flip_invariant_in_shape(seed in any::<u64>()) {
        let g = Grid::periodic(&[0.0, 0.0], &[1.0, 1.0], &[12, 12]).unwrap();
        let mut x = seed;
        let vals: Vec<f64> = (0..g.len()).map(|_| { x = x.wrapping_mul(6364136223846793005).wrapping_add(1); ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5 + 1e-9 }).collect();
        let a = extract_zero_contour(&Field::from_vec(&g, vals.clone()).unwrap()).unwrap();
        let b = extract_zero_contour(&Field::from_vec(&g, vals.iter().map(|v| -v).collect()).unwrap()).unwrap();
        let count = |c: &[linstab::harness::contour::Polyline]| c.iter().map(|p| p.points.len()).sum::<usize>();
        prop_assert_eq!(count(&a), count(&b));
    }
}

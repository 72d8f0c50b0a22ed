use proptest::prelude::*;
use toss_core::geometry::{Centerline, Point2, RoadCorridor};
use toss_core::lp::LpOptions;
use toss_core::model::VehicleParams;
use toss_core::planner::{plan, plan_with, InitialState, PlanRequest, PlannerConfig};

fn arc_points(radius: f64, length: f64) -> Vec<Point2> {
    let n = (length / 1.0).ceil() as usize;
    (0..=n)
        .map(|i| {
            let a = (i as f64 * length / n as f64) / radius;
            Point2::new(radius * a.sin(), radius * (1.0 - a.cos()))
        })
        .collect()
}

fn request(radius: f64, half: f64, v_max: f64, v0: f64, step: f64) -> PlanRequest {
    let c = Centerline::new(&arc_points(radius, 120.0), 1.0).unwrap();
    PlanRequest {
        corridor: RoadCorridor::uniform(c, -half, half, 1.0, v_max).unwrap(),
        vehicle: VehicleParams::default(),
        obstacles: Vec::new(),
        waypoints: Vec::new(),
        initial: InitialState::on_centerline(v0),
        config: PlannerConfig {
            horizon: 80.0,
            base_step: step,
            ..Default::default()
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn plans_keep_time_increasing_and_bounds(
        radius in 80.0f64..500.0,
        half in 2.5f64..4.0,
        v_max in 15.0f64..35.0,
        frac in 0.3f64..1.0,
        step in 1.5f64..3.0,
    ) {
        let req = request(radius, half, v_max, v_max * frac, step);
        // start below the lateral friction limit of the arc
        let lateral = (0.8 * 9.81 * radius).sqrt();
        prop_assume!(req.initial.speed < 0.95 * lateral);
        let r = plan(&req).unwrap();
        let tr = &r.pass2;
        prop_assert!(tr.time.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(r.lp_solves, 2);
        for (v, f) in tr.speed.iter().zip(&r.friction.speed) {
            prop_assert!(*v <= f + 1e-7);
            prop_assert!(*v <= v_max + 1e-7 && *v >= 1.0 - 1e-7);
        }
        let p = &req.vehicle;
        let mut prev = 0.0;
        for &d in &tr.delta {
            prop_assert!(d - prev <= req.config.t_tilde * p.steer_rate_max + 1e-7);
            prop_assert!(d - prev >= req.config.t_tilde * p.steer_rate_min - 1e-7);
            prev = d;
        }
    }
}

#[test]
fn variation_term_only_changes_steering_distribution() {
    let req = request(150.0, 3.5, 25.0, 15.0, 2.0);
    let base = plan(&req).unwrap();
    let opts = LpOptions {
        steer_variation_weight: 0.1,
        ..LpOptions::default()
    };
    let tv = plan_with(&req, opts).unwrap();
    let total = |d: &[f64]| d.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    assert!(total(&tv.pass2.delta) <= total(&base.pass2.delta) + 1e-9);
    assert_eq!(
        tv.lp.num_vars(),
        base.lp.num_vars() + base.grid.intervals() - 1
    );
}

#[test]
fn literal_objective_is_the_default() {
    assert_eq!(LpOptions::default().steer_variation_weight, 0.0);
    let req = request(150.0, 3.5, 25.0, 15.0, 2.0);
    let n = plan(&req).unwrap();
    assert_eq!(n.lp.num_vars(), 2 * n.grid.intervals() + 6);
}

#[test]
fn start_above_friction_limit_is_rejected() {
    let req = request(80.0, 2.5, 33.0, 31.0, 2.0);
    let e = plan(&req).unwrap_err().to_string();
    assert!(e.contains("friction limit"), "{e}");
}

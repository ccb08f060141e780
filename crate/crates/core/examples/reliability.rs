//! Windowed reliability: a user keeps service continuity only while its
//! recent outage ratio stays strictly below the service's threshold.

use oran_handover::qos::{continuity_ratio, objective_value, DelaySample, ReliabilityWindow, ServiceSpec};

pub fn run() -> (f64, f64) {
    let spec = ServiceSpec { outage_threshold: 0.05, ..ServiceSpec::default() };
    let mut steady = ReliabilityWindow::new(50);
    let mut bumpy = ReliabilityWindow::new(50);
    for t in 0..80 {
        steady.push(DelaySample::Delay(8.0));
        let s = match t % 20 {
            0 => DelaySample::Outage,
            10 => DelaySample::Delay(13.5),
            _ => DelaySample::Delay(9.0),
        };
        bumpy.push(s);
    }
    let a = steady.estimate(&spec);
    let b = bumpy.estimate(&spec);
    println!("steady user: eps {:.3}  rho {:.3}", a.epsilon_hat, a.rho);
    println!("bumpy user:  eps {:.3}  rho {:.3}  ({} outages in {})", b.epsilon_hat, b.rho, b.outage_count, b.window_size);

    let users = [(a.epsilon_hat, spec.outage_threshold), (b.epsilon_hat, spec.outage_threshold)];
    let r = continuity_ratio(users);
    let obj = objective_value(r, 1.0, 0.5, 0.5);
    println!("continuity ratio {r:.2}, objective with all transitional users continuous {obj:.2}");
    (r, obj)
}

fn main() {
    run();
}

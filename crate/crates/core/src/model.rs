//! Closed-form device energy and time model.
//!
//! Every quantity is SI: watts, joules, seconds, bytes and bytes/second.
//! Running a task locally costs `P_exec · T_exec`. Offloading it costs the
//! energy spent sending the input, idling while the server computes, and
//! receiving the result. The server is modeled only through the speedup
//! ratio `n`, so the idle time is `T_exec / n`.

use thiserror::Error;

/// Relative tolerance used for energy comparisons and identity checks.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("{0} must not be negative")]
    Negative(&'static str),
    #[error("invalid power profile: {0}")]
    InvalidPowerProfile(&'static str),
    #[error("unusable network: {0} bandwidth must be strictly positive")]
    UnusableNetwork(&'static str),
    #[error("speedup ratio must be at least 1 (got {0})")]
    SpeedupBelowOne(f64),
    #[error("device execution rate must be strictly positive")]
    NonPositiveRate,
}

pub type Result<T> = std::result::Result<T, ModelError>;

fn finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonFinite(what))
    }
}

fn non_negative(value: f64, what: &'static str) -> Result<f64> {
    let value = finite(value, what)?;
    if value < 0.0 {
        Err(ModelError::Negative(what))
    } else {
        Ok(value)
    }
}

/// True when `a` and `b` agree within [`REL_TOL`] relative to the larger magnitude.
pub fn approx_eq(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= REL_TOL * scale
}

/// Device power draw in each of its four states, in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    pub p_exec: f64,
    pub p_idle: f64,
    pub p_send: f64,
    pub p_receive: f64,
}

impl PowerProfile {
    pub fn new(p_exec: f64, p_idle: f64, p_send: f64, p_receive: f64) -> Result<Self> {
        let profile = Self {
            p_exec,
            p_idle,
            p_send,
            p_receive,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        for (value, name) in [
            (self.p_exec, "p_exec"),
            (self.p_idle, "p_idle"),
            (self.p_send, "p_send"),
            (self.p_receive, "p_receive"),
        ] {
            finite(value, name)?;
            if value <= 0.0 {
                return Err(ModelError::InvalidPowerProfile(
                    "all power draws must be strictly positive",
                ));
            }
        }
        if self.p_idle > self.p_exec {
            return Err(ModelError::InvalidPowerProfile(
                "idle draw cannot exceed active-compute draw",
            ));
        }
        Ok(())
    }
}

/// Computational demand of a task and the device/cloud rate ratio.
///
/// The cloud rate is never stored; it is always `n · m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeSpec {
    /// Instructions.
    pub c: f64,
    /// Device execution rate, instructions per second.
    pub m: f64,
    /// Cloud-to-device speedup ratio.
    pub n: f64,
}

impl ComputeSpec {
    pub fn new(c: f64, m: f64, n: f64) -> Result<Self> {
        non_negative(c, "computation complexity")?;
        if !(finite(m, "execution rate")? > 0.0) {
            return Err(ModelError::NonPositiveRate);
        }
        check_speedup(n)?;
        Ok(Self { c, m, n })
    }

    pub fn t_exec(&self) -> f64 {
        self.c / self.m
    }

    pub fn cloud_rate(&self) -> f64 {
        self.n * self.m
    }

    pub fn t_idle_max(&self) -> f64 {
        self.c / self.cloud_rate()
    }
}

/// Data volumes and link rates of one offload round trip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSpec {
    pub d_send: f64,
    pub d_receive: f64,
    pub b_send: f64,
    pub b_receive: f64,
}

impl TransferSpec {
    pub fn new(d_send: f64, d_receive: f64, b_send: f64, b_receive: f64) -> Result<Self> {
        let spec = Self {
            d_send,
            d_receive,
            b_send,
            b_receive,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same bandwidth in both directions.
    pub fn symmetric(d_send: f64, d_receive: f64, bandwidth: f64) -> Result<Self> {
        Self::new(d_send, d_receive, bandwidth, bandwidth)
    }

    pub fn validate(&self) -> Result<()> {
        non_negative(self.d_send, "d_send")?;
        non_negative(self.d_receive, "d_receive")?;
        if !(finite(self.b_send, "b_send")? > 0.0) {
            return Err(ModelError::UnusableNetwork("send"));
        }
        if !(finite(self.b_receive, "b_receive")? > 0.0) {
            return Err(ModelError::UnusableNetwork("receive"));
        }
        Ok(())
    }
}

/// Full energy/time account behind one local-vs-cloud comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLedger {
    pub e_local: f64,
    pub e_send: f64,
    pub e_idle: f64,
    pub e_receive: f64,
    pub e_cloud: f64,
    pub e_tradeoff: f64,
    pub e_prime: f64,
    pub e0_prime: f64,
    pub t_exec: f64,
    pub t_send: f64,
    pub t_idle: f64,
    pub t_receive: f64,
}

impl EnergyLedger {
    /// Wall time of the offloaded path: send, wait, receive.
    pub fn t_cloud(&self) -> f64 {
        self.t_send + self.t_idle + self.t_receive
    }
}

/// Energy of the three offload phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudEnergy {
    pub t_send: f64,
    pub t_receive: f64,
    pub t_idle: f64,
    pub e_send: f64,
    pub e_idle: f64,
    pub e_receive: f64,
    pub e_cloud: f64,
}

fn check_speedup(n: f64) -> Result<f64> {
    let n = finite(n, "speedup ratio")?;
    if n < 1.0 {
        Err(ModelError::SpeedupBelowOne(n))
    } else {
        Ok(n)
    }
}

pub fn local_energy(profile: &PowerProfile, t_exec: f64) -> Result<f64> {
    profile.validate()?;
    let t_exec = non_negative(t_exec, "t_exec")?;
    Ok(profile.p_exec * t_exec)
}

/// `(t_send, t_receive)` for the given payloads and link rates.
pub fn transfer_times(transfer: &TransferSpec) -> Result<(f64, f64)> {
    transfer.validate()?;
    Ok((
        transfer.d_send / transfer.b_send,
        transfer.d_receive / transfer.b_receive,
    ))
}

/// Upper bound on the device's idle time while the cloud runs the task.
/// Used as the idle time everywhere downstream.
pub fn idle_time_max(t_exec: f64, n: f64) -> Result<f64> {
    let t_exec = non_negative(t_exec, "t_exec")?;
    let n = check_speedup(n)?;
    Ok(t_exec / n)
}

pub fn cloud_energy(
    profile: &PowerProfile,
    transfer: &TransferSpec,
    t_idle: f64,
) -> Result<CloudEnergy> {
    profile.validate()?;
    let t_idle = non_negative(t_idle, "t_idle")?;
    let (t_send, t_receive) = transfer_times(transfer)?;
    let e_send = profile.p_send * t_send;
    let e_idle = profile.p_idle * t_idle;
    let e_receive = profile.p_receive * t_receive;
    Ok(CloudEnergy {
        t_send,
        t_receive,
        t_idle,
        e_send,
        e_idle,
        e_receive,
        e_cloud: e_send + e_idle + e_receive,
    })
}

/// Break-even transmission energy `E0'` and the actual transmission energy `E'`.
///
/// Offloading saves energy exactly when `E0' > E'`.
pub fn breakeven_pair(
    profile: &PowerProfile,
    t_exec: f64,
    t_idle: f64,
    transfer: &TransferSpec,
) -> Result<(f64, f64)> {
    profile.validate()?;
    let t_exec = non_negative(t_exec, "t_exec")?;
    let t_idle = non_negative(t_idle, "t_idle")?;
    let (t_send, t_receive) = transfer_times(transfer)?;
    let e0_prime = profile.p_exec * t_exec - profile.p_idle * t_idle;
    let e_prime = profile.p_send * t_send + profile.p_receive * t_receive;
    Ok((e0_prime, e_prime))
}

/// Evaluates every term of the model for one task, with `T_idle = T_exec / n`.
pub fn energy_ledger(
    profile: &PowerProfile,
    t_exec: f64,
    n: f64,
    transfer: &TransferSpec,
) -> Result<EnergyLedger> {
    let t_idle = idle_time_max(t_exec, n)?;
    let e_local = local_energy(profile, t_exec)?;
    let cloud = cloud_energy(profile, transfer, t_idle)?;
    let (e0_prime, e_prime) = breakeven_pair(profile, t_exec, t_idle, transfer)?;
    Ok(EnergyLedger {
        e_local,
        e_send: cloud.e_send,
        e_idle: cloud.e_idle,
        e_receive: cloud.e_receive,
        e_cloud: cloud.e_cloud,
        e_tradeoff: e_local - cloud.e_cloud,
        e_prime,
        e0_prime,
        t_exec,
        t_send: cloud.t_send,
        t_idle,
        t_receive: cloud.t_receive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile() -> PowerProfile {
        PowerProfile::new(0.9, 0.3, 1.3, 1.0).unwrap()
    }

    #[test]
    fn local_energy_examples() {
        let p = profile();
        assert_eq!(local_energy(&p, 0.0).unwrap(), 0.0);
        assert!((local_energy(&p, 10.0).unwrap() - 9.0).abs() < 1e-12);
        let unit = PowerProfile::new(1.0, 0.3, 1.3, 1.0).unwrap();
        assert_eq!(local_energy(&unit, 23.0).unwrap(), 23.0);
    }

    #[test]
    fn local_energy_rejects_bad_time() {
        let p = profile();
        assert_eq!(local_energy(&p, -1.0), Err(ModelError::Negative("t_exec")));
        assert!(local_energy(&p, f64::NAN).is_err());
        assert!(local_energy(&p, f64::INFINITY).is_err());
    }

    #[test]
    fn transfer_time_examples() {
        let t = TransferSpec::new(0.0, 0.0, 100.0, 100.0).unwrap();
        assert_eq!(transfer_times(&t).unwrap().0, 0.0);
        let t = TransferSpec::new(650_000.0, 50_000.0, 650_000.0, 731_500.0).unwrap();
        let (send, receive) = transfer_times(&t).unwrap();
        assert_eq!(send, 1.0);
        assert!((receive - 0.068_352_699_931_647_3).abs() < 1e-12);
    }

    #[test]
    fn zero_bandwidth_is_unusable() {
        let t = TransferSpec {
            d_send: 1.0,
            d_receive: 1.0,
            b_send: 0.0,
            b_receive: 1.0,
        };
        assert_eq!(transfer_times(&t), Err(ModelError::UnusableNetwork("send")));
        assert!(TransferSpec::symmetric(1.0, 1.0, -5.0).is_err());
    }

    #[test]
    fn idle_time_examples() {
        assert_eq!(idle_time_max(10.0, 1.0).unwrap(), 10.0);
        assert_eq!(idle_time_max(10.0, 10.0).unwrap(), 1.0);
        assert_eq!(idle_time_max(0.0, 5.0).unwrap(), 0.0);
        assert_eq!(
            idle_time_max(10.0, 0.5),
            Err(ModelError::SpeedupBelowOne(0.5))
        );
    }

    #[test]
    fn cloud_energy_examples() {
        let p = PowerProfile::new(0.9, 0.3, 1.0, 1.0).unwrap();
        let zero = TransferSpec::symmetric(0.0, 0.0, 1.0).unwrap();
        assert_eq!(cloud_energy(&p, &zero, 0.0).unwrap().e_cloud, 0.0);

        // 2 s sending, 0.5 s receiving, 1 s idle.
        let t = TransferSpec::new(2.0, 1.0, 1.0, 2.0).unwrap();
        let c = cloud_energy(&p, &t, 1.0).unwrap();
        assert!((c.e_cloud - 2.8).abs() < 1e-12);
    }

    #[test]
    fn breakeven_examples() {
        let p = profile();
        let zero = TransferSpec::symmetric(0.0, 0.0, 1.0).unwrap();
        let (e0, e_prime) = breakeven_pair(&p, 10.0, 1.0, &zero).unwrap();
        assert!((e0 - 8.7).abs() < 1e-12);
        assert_eq!(e_prime, 0.0);
    }

    #[test]
    fn profile_invariants() {
        assert!(PowerProfile::new(0.3, 0.9, 1.0, 1.0).is_err());
        assert!(PowerProfile::new(0.9, 0.0, 1.0, 1.0).is_err());
        assert!(PowerProfile::new(0.9, 0.3, f64::NAN, 1.0).is_err());
        assert!(PowerProfile::new(0.9, 0.9, 1.0, 1.0).is_ok());
    }

    #[test]
    fn compute_spec_rates() {
        let c = ComputeSpec::new(1e9, 1e8, 10.0).unwrap();
        assert_eq!(c.t_exec(), 10.0);
        assert_eq!(c.cloud_rate(), 1e9);
        assert_eq!(c.t_idle_max(), idle_time_max(c.t_exec(), c.n).unwrap());
        assert!(ComputeSpec::new(1.0, 0.0, 1.0).is_err());
        assert!(ComputeSpec::new(1.0, 1.0, 0.9).is_err());
    }

    fn arb_profile() -> impl Strategy<Value = PowerProfile> {
        (0.01f64..5.0, 0.01f64..1.0, 0.01f64..5.0, 0.01f64..5.0).prop_map(
            |(exec, idle_frac, send, receive)| PowerProfile {
                p_exec: exec,
                p_idle: exec * idle_frac,
                p_send: send,
                p_receive: receive,
            },
        )
    }

    proptest! {
        #[test]
        fn phases_sum_to_cloud_energy(
            p in arb_profile(),
            d_send in 0.0f64..1e8,
            d_receive in 0.0f64..1e8,
            b_send in 1.0f64..1e8,
            b_receive in 1.0f64..1e8,
            t_idle in 0.0f64..1e3,
        ) {
            let t = TransferSpec::new(d_send, d_receive, b_send, b_receive).unwrap();
            let c = cloud_energy(&p, &t, t_idle).unwrap();
            let brute = p.p_send * (d_send / b_send)
                + p.p_idle * t_idle
                + p.p_receive * (d_receive / b_receive);
            prop_assert!(approx_eq(c.e_cloud, brute));
            prop_assert!(c.e_cloud >= 0.0);
        }

        #[test]
        fn cloud_energy_decreases_with_bandwidth(
            p in arb_profile(),
            d in 1.0f64..1e8,
            b in 1.0f64..1e7,
            factor in 1.01f64..10.0,
        ) {
            let slow = TransferSpec::new(d, d, b, b).unwrap();
            let fast_send = TransferSpec::new(d, d, b * factor, b).unwrap();
            let fast_receive = TransferSpec::new(d, d, b, b * factor).unwrap();
            let base = cloud_energy(&p, &slow, 1.0).unwrap().e_cloud;
            prop_assert!(cloud_energy(&p, &fast_send, 1.0).unwrap().e_cloud < base);
            prop_assert!(cloud_energy(&p, &fast_receive, 1.0).unwrap().e_cloud < base);
        }

        #[test]
        fn local_energy_ignores_transfer(
            p in arb_profile(),
            t_exec in 0.0f64..1e3,
            b1 in 1.0f64..1e8,
            b2 in 1.0f64..1e8,
        ) {
            let a = energy_ledger(&p, t_exec, 2.0, &TransferSpec::symmetric(10.0, 10.0, b1).unwrap()).unwrap();
            let b = energy_ledger(&p, t_exec, 2.0, &TransferSpec::symmetric(1e6, 5.0, b2).unwrap()).unwrap();
            prop_assert_eq!(a.e_local, b.e_local);
        }

        #[test]
        fn doubling_payload_and_bandwidth_keeps_send_time(
            d in 0.0f64..1e8,
            b in 1.0f64..1e8,
        ) {
            let one = transfer_times(&TransferSpec::new(d, 0.0, b, 1.0).unwrap()).unwrap().0;
            let two = transfer_times(&TransferSpec::new(2.0 * d, 0.0, 2.0 * b, 1.0).unwrap()).unwrap().0;
            prop_assert_eq!(one, two);
        }

        #[test]
        fn tradeoff_identity(
            p in arb_profile(),
            t_exec in 0.0f64..1e3,
            n in 1.0f64..100.0,
            d_send in 0.0f64..1e8,
            d_receive in 0.0f64..1e8,
            b in 1.0f64..1e8,
        ) {
            let t = TransferSpec::symmetric(d_send, d_receive, b).unwrap();
            let l = energy_ledger(&p, t_exec, n, &t).unwrap();
            let scale = l.e_local.max(l.e_cloud);
            prop_assert!((l.e_tradeoff - (l.e0_prime - l.e_prime)).abs() <= REL_TOL * scale);
            prop_assert!(l.t_send >= 0.0 && l.t_idle >= 0.0 && l.t_receive >= 0.0);
        }
    }
}

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use radiance_core::model_params::{photon_energy_to_wavenumber, wavenumber_to_kev, PROTON_MASS};
use radiance_core::radiation::{self, spectrum_sweep, EmissionSummary, RadiationError};
use radiance_core::{
    approx_roots, cardan_roots, characteristic::relative_residual, GrwParams, KernelKind, ModelParams,
    Oscillations, PhotonEnergy, PhysicalConstants, PolePolicy, Regime, ResponseEval, Sign,
};
use radiance_dynamics::{
    ensemble_run, evolve_master, Decoherence, DensityMatrixGrid, EnsembleConfig, Hamiltonian, WavefunctionGrid,
};

use crate::cli::*;
use crate::output::{col, Cell, Report};
use crate::CliError;

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Constants(a) => constants(a),
        Command::Roots(a) => roots(a),
        Command::Response(a) => response(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Energy(a) => energy(a),
        Command::Simulate(a) => simulate(a),
        Command::Master(a) => master(a),
        Command::Limits(a) => limits(a),
    }
}

fn constants_for(units: Units) -> PhysicalConstants {
    match units {
        Units::Si => PhysicalConstants::CODATA_2018,
        Units::Natural => PhysicalConstants::natural(),
    }
}

fn resolve_lambda(p: &ParticleArgs) -> Result<f64, CliError> {
    if let Some(l) = p.lambda {
        return Ok(l);
    }
    // clap guarantees α accompanies λ_GRW and γ
    if let Some(lg) = p.lambda_grw {
        return Ok(GrwParams::from_grw(lg, p.alpha.unwrap_or(f64::NAN))?.lambda_qmupl());
    }
    if let Some(g) = p.gamma_csl {
        return Ok(GrwParams::from_csl(g, p.alpha.unwrap_or(f64::NAN))?.lambda_qmupl());
    }
    Ok(match p.units {
        Units::Si => GrwParams::standard().lambda_qmupl(),
        Units::Natural => 1.0,
    })
}

pub fn resolve_params(p: &ParticleArgs) -> Result<ModelParams, CliError> {
    let c = constants_for(p.units);
    let mass = p.mass.unwrap_or(match (p.units, p.particle) {
        (Units::Natural, _) => 1.0,
        (Units::Si, Particle::Electron) => c.electron_mass,
        (Units::Si, Particle::Proton) => PROTON_MASS,
    });
    let charge = p.charge.unwrap_or(match p.units {
        Units::Si => c.elementary_charge,
        Units::Natural => 0.0,
    });
    Ok(ModelParams::new(c, mass, charge, p.omega0, resolve_lambda(p)?)?)
}

/// Exit-3 guard: bound particles at or beyond 2m/(√27β) need `--force-exact`.
fn check_validity(params: &ModelParams, force_exact: bool) -> Result<(), CliError> {
    if force_exact || params.is_free() || params.in_validity_region() {
        return Ok(());
    }
    Err(CliError::Validity(format!(
        "ω₀ = {:e} s⁻¹ is at or beyond the validity bound {:e} s⁻¹; pass --force-exact to use the exact roots",
        params.omega0(),
        params.validity_bound()
    )))
}

fn constants(a: &ConstantsArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    let c = p.constants();
    let mut r = Report::new(vec![col("quantity", ""), col("value", ""), col("unit", "")], p, a.particle.units);
    let mut row = |q: &str, v: f64, u: &str| r.push(vec![q.into(), v.into(), u.into()]);
    row("hbar", c.hbar, "J s");
    row("c", c.c, "m/s");
    row("epsilon0", c.epsilon0, "F/m");
    row("elementary_charge", c.elementary_charge, "C");
    row("electron_mass", c.electron_mass, "kg");
    row("mass", p.mass(), "kg");
    row("charge", p.charge(), "C");
    row("omega0", p.omega0(), "rad/s");
    row("kappa", p.kappa(), "kg/s^2");
    row("lambda", p.lambda(), "m^-2 s^-1");
    row("beta", p.beta(), "kg s");
    row("validity_bound", p.validity_bound(), "rad/s");
    row("runaway_rate", p.runaway_rate(), "1/s");
    Ok(r)
}

fn roots(a: &RootsArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    check_validity(&p, a.particle.force_exact)?;
    let mut r = Report::new(
        vec![
            col("method", ""),
            col("root", ""),
            col("re_per_s", "1/s"),
            col("im_per_s", "1/s"),
            col("relative_residual", ""),
        ],
        p,
        a.particle.units,
    );
    let mut sets = Vec::new();
    if a.method != RootMethodArg::Approx {
        sets.push(("cardan", cardan_roots(&p)?));
    }
    if a.method != RootMethodArg::Cardan {
        // beyond the bound (only reachable with --force-exact) the
        // expansion has no meaning; `both` then reports the exact roots only
        match approx_roots(&p) {
            Ok(z) => sets.push(("approx", z)),
            Err(e) if a.method == RootMethodArg::Approx => return Err(e.into()),
            Err(_) => {}
        }
    }
    for (method, z) in &sets {
        for (name, root) in ["z1", "z2", "z3"].into_iter().zip(z.as_array()) {
            r.push(vec![
                (*method).into(),
                name.into(),
                root.re.into(),
                root.im.into(),
                relative_residual(&p, root).into(),
            ]);
        }
    }
    let exact = cardan_roots(&p)?;
    r.summary = vec![
        ("validity_bound", p.validity_bound().into()),
        ("in_validity_region", Cell::Bool(p.in_validity_region())),
        ("runaway_rate", exact.z1.re.into()),
        ("transient_decay_time", if p.is_free() { f64::NAN } else { 1.0 / exact.decay_rate() }.into()),
    ];
    Ok(r)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    let mut out: Vec<f64> = linspace(la, lb, n).into_iter().map(f64::exp).collect();
    // pin the end points exactly
    if let Some(f) = out.first_mut() {
        *f = a;
    }
    if n > 1 {
        out[n - 1] = b;
    }
    out
}

fn response(a: &ResponseArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    check_validity(&p, a.particle.force_exact)?;
    if a.points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    if a.tmax < a.tmin {
        return Err(CliError::Usage("--tmax must not be below --tmin".into()));
    }
    let (kind, unit, needs_k, needs_kp) = match a.kernel {
        KernelArg::F0 => (KernelKind::F0, "s/kg", false, false),
        KernelArg::F1 => (KernelKind::F1, "s^2/kg", false, false),
        KernelArg::F2 => (KernelKind::F2, "s^3/kg", false, false),
        KernelArg::Gp0 => (KernelKind::GPlus0, "s^2/kg", true, false),
        KernelArg::Gp1 => (KernelKind::GPlus1, "s/kg", true, false),
        KernelArg::Gm0 => (KernelKind::GMinus0, "s^2/kg", true, false),
        KernelArg::Gm1 => (KernelKind::GMinus1, "s/kg", true, false),
        KernelArg::Gpp => (KernelKind::Gpm(Sign::Plus, Sign::Plus), "s/kg", true, true),
        KernelArg::Gpm => (KernelKind::Gpm(Sign::Plus, Sign::Minus), "s/kg", true, true),
        KernelArg::Gmp => (KernelKind::Gpm(Sign::Minus, Sign::Plus), "s/kg", true, true),
        KernelArg::Gmm => (KernelKind::Gpm(Sign::Minus, Sign::Minus), "s/kg", true, true),
    };
    if needs_k && a.k.is_none() {
        return Err(CliError::Usage("this kernel needs --k".into()));
    }
    if needs_kp && a.k_prime.is_none() {
        return Err(CliError::Usage("this kernel needs --k-prime".into()));
    }
    let policy = PolePolicy { include_runaway: a.include_runaway, include_field_pole: !a.exclude_field };
    let mut r = Report::new(vec![col("t_s", "s"), col("re", unit), col("im", unit)], p, a.particle.units);
    for t in linspace(a.tmin, a.tmax, a.points) {
        let v = ResponseEval::evaluate(&p, kind, a.k, a.k_prime, t, policy)?.value;
        r.push(vec![t.into(), v.re.into(), v.im.into()]);
    }
    Ok(r)
}

fn kev_to_k(e: f64, c: &PhysicalConstants) -> Result<f64, CliError> {
    Ok(photon_energy_to_wavenumber(PhotonEnergy::KeV(e), c)?)
}

fn spectrum(a: &SpectrumArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    let c = *p.constants();
    let regime = match a.regime {
        RegimeArg::FreeExact => Regime::FreeExact,
        RegimeArg::FreeBeta0 => Regime::FreeBeta0,
        RegimeArg::HoLargeTime => Regime::HoLargeTime,
        RegimeArg::HoFiniteTime => Regime::HoFiniteTime,
        RegimeArg::HoBeta0 => Regime::HoBeta0,
    };
    if regime.is_bound() {
        check_validity(&p, a.particle.force_exact)?;
    }
    let (kmin, kmax) = match (a.kmin, a.kmax, a.emin_kev, a.emax_kev) {
        (Some(lo), Some(hi), _, _) => (lo, hi),
        (_, _, Some(lo), Some(hi)) => (kev_to_k(lo, &c)?, kev_to_k(hi, &c)?),
        _ => return Err(CliError::Usage("give --kmin/--kmax or --emin-kev/--emax-kev".into())),
    };
    if !(kmin > 0.0 && kmax >= kmin && kmin.is_finite() && kmax.is_finite()) {
        return Err(CliError::Usage(format!("invalid wavenumber range [{kmin:e}, {kmax:e}]")));
    }
    if a.points == 0 || (a.points > 1 && kmax == kmin) {
        return Err(CliError::Usage("--points must be at least 1 and the range non-empty".into()));
    }
    let grid = if a.linear { linspace(kmin, kmax, a.points) } else { logspace(kmin, kmax, a.points) };
    let osc = if a.retain_oscillations { Oscillations::Retained } else { Oscillations::Averaged };

    let (points, summary) = match spectrum_sweep(&p, &grid, regime, a.t, osc) {
        Ok(s) => (s.points, Some(s.summary)),
        // grid too coarse for a tail fit: report the points alone
        Err(RadiationError::GridTooShort { .. }) => (
            grid.iter()
                .map(|&k| radiation::emission_rate(&p, k, regime, a.t, osc))
                .collect::<Result<Vec<_>, _>>()?,
            None,
        ),
        Err(e) => return Err(e.into()),
    };
    let mut r = Report::new(
        vec![col("k_per_m", "1/m"), col("energy_kev", "keV"), col("dGamma_dk", "1/s per 1/m"), col("regime", "")],
        p,
        a.particle.units,
    );
    let regime_name = a.regime.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
    for pt in &points {
        r.push(vec![pt.k.into(), wavenumber_to_kev(pt.k, &c).into(), pt.rate.into(), Cell::Text(regime_name.clone())]);
    }
    r.summary = spectrum_summary(summary, &p);
    Ok(r)
}

use clap::ValueEnum;

fn spectrum_summary(s: Option<EmissionSummary>, p: &ModelParams) -> Vec<(&'static str, Cell)> {
    match s {
        Some(s) => vec![
            ("energy_growth_rate", s.energy_growth_rate.into()),
            ("resonance_k", s.resonance_k.into()),
            ("resonance_peak", s.resonance_peak.into()),
            ("tail_exponent", s.tail_exponent.into()),
            ("ultraviolet_catastrophe", Cell::Bool(s.ultraviolet_catastrophe)),
            ("transient_decay_time", s.transient_decay_time.into()),
        ],
        None => vec![
            ("energy_growth_rate", radiation::mean_energy_growth(p).ok().into()),
            ("tail_exponent", None.into()),
        ],
    }
}

fn energy(a: &EnergyArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    if !p.is_free() {
        return Err(CliError::Usage("energy growth is defined for a free particle; drop --omega0".into()));
    }
    let hbar = p.hbar();
    let mut r = Report::new(vec![col("quantity", ""), col("value", ""), col("unit", "")], p, a.particle.units);
    let mut row = |q: &str, v: f64, u: &str| r.push(vec![q.into(), v.into(), u.into()]);
    row("lambda", p.lambda(), "m^-2 s^-1");
    row("mass", p.mass(), "kg");
    row("dE_dt", radiation::mean_energy_growth(&p)?, "W");
    row("dE_dt_1d", 0.5 * p.lambda() * hbar * hbar / p.mass(), "W");
    row("dp2_dt_1d", p.lambda() * hbar * hbar, "kg^2 m^2 s^-3");
    if let (Some(lg), Some(alpha)) = (a.particle.lambda_grw, a.particle.alpha) {
        row("dE_dt_grw", radiation::mean_energy_growth_grw(lg, alpha, p.mass(), hbar), "W");
    }
    Ok(r)
}

fn parse_zeta(s: &str) -> Result<Complex64, CliError> {
    Ok(match s.trim() {
        "1" | "one" => Complex64::new(1.0, 0.0),
        "-1" => Complex64::new(-1.0, 0.0),
        "i" => Complex64::new(0.0, 1.0),
        "-i" => Complex64::new(0.0, -1.0),
        other => {
            let theta: f64 =
                other.parse().map_err(|_| CliError::Usage(format!("cannot parse --zeta `{other}`")))?;
            if theta == FRAC_PI_2 {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::from_polar(1.0, theta)
            }
        }
    })
}

fn initial_state(g: &GridArgs) -> Result<WavefunctionGrid, CliError> {
    let psi = match g.cat_separation {
        None => WavefunctionGrid::gaussian(g.x_min, g.x_max, g.n_points, g.center, g.sigma, g.k0)?,
        Some(d) => {
            if !(0.0..=1.0).contains(&g.cat_weight) {
                return Err(CliError::Usage("--cat-weight must lie in [0, 1]".into()));
            }
            // well-separated branches: the weights are the branch probabilities
            let left = Complex64::new((1.0 - g.cat_weight).sqrt(), 0.0);
            let right = Complex64::new(g.cat_weight.sqrt(), 0.0);
            WavefunctionGrid::superposition(
                g.x_min,
                g.x_max,
                g.n_points,
                &[(left, g.center - d / 2.0, g.sigma, g.k0), (right, g.center + d / 2.0, g.sigma, g.k0)],
            )?
        }
    };
    psi.check_boundary()?;
    Ok(psi)
}

fn hamiltonian(g: &GridArgs, p: &ModelParams) -> Result<Hamiltonian, CliError> {
    Ok(match g.hamiltonian {
        HamiltonianArg::Zero => Hamiltonian::Zero,
        HamiltonianArg::Free => Hamiltonian::Free,
        HamiltonianArg::Harmonic if p.omega0() > 0.0 => Hamiltonian::Harmonic { omega0: p.omega0() },
        HamiltonianArg::Harmonic => return Err(CliError::Usage("harmonic Hamiltonian needs --omega0 > 0".into())),
    })
}

fn simulate(a: &SimulateArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    let psi0 = initial_state(&a.grid)?;
    let config = EnsembleConfig {
        zeta: parse_zeta(&a.zeta)?,
        hamiltonian: hamiltonian(&a.grid, &p)?,
        dt: a.grid.dt,
        t_final: a.grid.t_final,
        sample_every: a.sample_every,
        n_traj: a.n_traj,
        master_seed: a.seed,
        accumulate_density: false,
        max_standard_error: a.max_standard_error,
    };
    let stats = ensemble_run(&p, &psi0, &config)?;
    let mut r = Report::new(
        vec![
            col("t", "s"),
            col("mean_q", "m"),
            col("se_q", "m"),
            col("mean_q2", "m^2"),
            col("se_q2", "m^2"),
            col("mean_p2", "kg^2 m^2 s^-2"),
            col("se_p2", "kg^2 m^2 s^-2"),
        ],
        p,
        a.particle.units,
    );
    r.seed = Some(a.seed);
    for (i, &t) in stats.times.iter().enumerate() {
        r.push(vec![
            t.into(),
            stats.q.mean[i].into(),
            stats.q.standard_error[i].into(),
            stats.q2.mean[i].into(),
            stats.q2.standard_error[i].into(),
            stats.p2.mean[i].into(),
            stats.p2.standard_error[i].into(),
        ]);
    }
    let slope = stats.p2_slope();
    let (frac, frac_se) = stats.fraction_above(a.grid.center);
    r.summary = vec![
        ("n_traj", Cell::Int(stats.n_traj as u64)),
        ("p2_slope", slope.into()),
        ("p2_slope_expected", (p.lambda() * p.hbar() * p.hbar()).into()),
        ("kinetic_energy_rate", (slope / (2.0 * p.mass())).into()),
        ("fraction_right", frac.into()),
        ("fraction_right_se", frac_se.into()),
    ];
    Ok(r)
}

fn decoherence(a: &MasterArgs, p: &ModelParams) -> Result<Decoherence, CliError> {
    Ok(match a.model {
        ModelArg::Qmupl => Decoherence::Qmupl { lambda: p.lambda() },
        ModelArg::Grw => {
            let pa = &a.particle;
            let alpha = pa.alpha.ok_or_else(|| CliError::Usage("the GRW model needs --alpha".into()))?;
            let grw = match (pa.lambda_grw, pa.gamma_csl) {
                (Some(lg), _) => GrwParams::from_grw(lg, alpha)?,
                (_, Some(g)) => GrwParams::from_csl(g, alpha)?,
                // λ_GRW matching the resolved λ at short distances
                _ => GrwParams::from_grw(2.0 * p.lambda() / alpha, alpha)?,
            };
            Decoherence::Grw { lambda_grw: grw.lambda_grw, alpha: grw.alpha }
        }
    })
}

fn master(a: &MasterArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    let psi0 = initial_state(&a.grid)?;
    let h = hamiltonian(&a.grid, &p)?;
    let d = decoherence(a, &p)?;
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let segment = a.grid.t_final / a.samples as f64;
    let mut rho = DensityMatrixGrid::from_pure(&psi0);
    let mut r = Report::new(
        vec![
            col("t", "s"),
            col("trace", ""),
            col("purity", ""),
            col("mean_q", "m"),
            col("mean_q2", "m^2"),
            col("mean_p2", "kg^2 m^2 s^-2"),
            col("min_eigenvalue", ""),
        ],
        p,
        a.particle.units,
    );
    let hbar = p.hbar();
    for i in 0..=a.samples {
        if i > 0 {
            rho = evolve_master(&rho, &p, h, d, segment, a.grid.dt)?;
        }
        let (q, q2) = rho.position_moments();
        r.push(vec![
            (i as f64 * segment).into(),
            rho.trace().re.into(),
            rho.purity().into(),
            q.into(),
            q2.into(),
            rho.p2_expectation(hbar).into(),
            rho.min_eigenvalue().into(),
        ]);
    }
    Ok(r)
}

fn limits(a: &LimitsArgs) -> Result<Report, CliError> {
    let p = resolve_params(&a.particle)?;
    let k = match (a.k, a.energy_kev) {
        (Some(k), _) => k,
        (_, Some(e)) => kev_to_k(e, p.constants())?,
        _ => return Err(CliError::Usage("give --k or --energy-kev".into())),
    };
    if !(k > 0.0 && k.is_finite()) {
        return Err(CliError::Usage(format!("wavenumber must be positive, got {k:e}")));
    }
    let witness = p.with_omega0(p.omega_k(k) / 10.0)?;
    check_validity(&witness, a.particle.force_exact)?;
    let t = a.t.unwrap_or(10.0 / p.omega_k(k));
    let rep = radiation::limit_noncommutation(&p, k, t, a.decades)?;

    let mut r = Report::new(
        vec![col("limit", ""), col("omega0_rad_per_s", "rad/s"), col("t_s", "s"), col("dGamma_dk", "1/s per 1/m"), col("ratio_to_free", "")],
        p,
        a.particle.units,
    );
    r.push(vec!["free".into(), 0.0.into(), f64::INFINITY.into(), rep.free_rate.into(), 1.0.into()]);
    for &(w0, rate) in &rep.finite_time_sequence {
        r.push(vec!["omega0_to_0_at_fixed_t".into(), w0.into(), t.into(), rate.into(), (rate / rep.free_rate).into()]);
    }
    r.push(vec![
        "t_to_inf_at_witness".into(),
        rep.witness_omega0.into(),
        f64::INFINITY.into(),
        rep.large_time_at_witness.into(),
        rep.large_time_ratio.into(),
    ]);
    r.push(vec![
        "t_to_inf_then_omega0_to_0".into(),
        0.0.into(),
        f64::INFINITY.into(),
        (rep.large_time_limit_ratio * rep.free_rate).into(),
        rep.large_time_limit_ratio.into(),
    ]);
    r.summary = vec![
        ("k", k.into()),
        ("energy_kev", wavenumber_to_kev(k, p.constants()).into()),
        ("t", t.into()),
        ("finite_time_ratio", rep.finite_time_ratio.into()),
        ("large_time_limit_ratio", rep.large_time_limit_ratio.into()),
        ("limits_commute", Cell::Bool((rep.finite_time_ratio - rep.large_time_limit_ratio).abs() < 0.1)),
    ];
    Ok(r)
}

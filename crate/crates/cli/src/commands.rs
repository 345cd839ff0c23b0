//! Command implementations. Each returns tables; printing and file output
//! are handled by the caller.

use sqzkit_core::fit::{fit_opo_curve, fitted_curve, FitFixed, FitPoint};
use sqzkit_core::loss::{correction_pipeline, LossChain, Tier};
use sqzkit_core::network::run_scenario;
use sqzkit_core::opo::{homodyne_trace, pump_ratio, squeezing_spectrum, OpoError};
use sqzkit_core::optics::{
    beam_radius_at, cavity_length_for_waist, confocal_crystal_length, hemispherical_waist,
    paraxial_figure_of_merit, rayleigh_range, CavityGeometry, FiberMode, GaussianBeam,
};

use crate::error::{exit, CliError};
use crate::scenario::{CavitySection, CorrectionInput, FiberSpec, Scenario};
use crate::table::{Cell, ResultTable};

/// `KEY=LO:HI:N`, N evenly spaced values including both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub key: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Sweep {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = || CliError::input(format!("--sweep {spec:?}: expected KEY=LO:HI:N"));
        let (key, range) = spec.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if key.is_empty() || parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if count == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(Self {
            key: key.trim().to_string(),
            lo,
            hi,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.lo + step * i as f64).collect()
    }
}

fn unsupported_sweep(command: &str, sweep: &Sweep, supported: &[&str]) -> CliError {
    if supported.is_empty() {
        CliError::input(format!("{command} does not support --sweep"))
    } else {
        CliError::input(format!(
            "{command}: unsupported sweep key {:?} (supported: {})",
            sweep.key,
            supported.join(", ")
        ))
    }
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub tables: Vec<ResultTable>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

impl CommandOutput {
    fn ok(tables: Vec<ResultTable>) -> Self {
        Self {
            tables,
            warnings: Vec::new(),
            exit_code: exit::SUCCESS,
        }
    }
}

fn section<'a, T>(s: &'a Option<T>, name: &str, command: &str) -> Result<&'a T, CliError> {
    s.as_ref().ok_or_else(|| {
        CliError::input(format!(
            "{command} needs a `{name}` section in the scenario"
        ))
    })
}

pub fn cavity_design(
    scenario: &Scenario,
    sweep: Option<&Sweep>,
) -> Result<CommandOutput, CliError> {
    let cavity = section(&scenario.cavity, "cavity", "cavity-design")?;
    let fibers: Vec<FiberSpec> = match sweep {
        None => cavity.fibers.clone(),
        Some(s) if s.key == "waist_um" => s
            .values()
            .into_iter()
            .map(|w| FiberSpec {
                name: "sweep".into(),
                waist_um: w,
                overlap_discount: None,
            })
            .collect(),
        Some(s) => return Err(unsupported_sweep("cavity-design", s, &["waist_um"])),
    };
    if fibers.is_empty() {
        return Err(CliError::input("cavity-design: no fibers given"));
    }
    let mut table = ResultTable::new(
        "cavity_design",
        &[
            ("fiber", "-"),
            ("fiber_waist_um", "um"),
            ("solved_length_mm", "mm"),
            ("near_planar_length_mm", "mm"),
            ("rc_minus_solved_length_nm", "nm"),
            ("cavity_length_mm", "mm"),
            ("cavity_waist_um", "um"),
            ("rayleigh_range_um", "um"),
            ("crystal_length_um", "um"),
            ("mirror_spot_um", "um"),
            ("paraxial_fom", "1"),
            ("coupling", "1"),
        ],
    );
    for fiber in &fibers {
        table.push(cavity_row(cavity, fiber)?);
    }
    table.note(format!(
        "crystal_length is 2 z_R inside the crystal (n = {})",
        cavity.crystal_index()
    ));
    Ok(CommandOutput::ok(vec![table]))
}

fn cavity_row(cavity: &CavitySection, fiber: &FiberSpec) -> Result<Vec<Cell>, CliError> {
    let input = |e: sqzkit_core::OpticsError| CliError::input(format!("fiber {}: {e}", fiber.name));
    let rc = cavity.mirror_curvature_mm * 1e-3;
    let lambda = cavity.wavelength_nm * 1e-9;
    let fiber_beam = GaussianBeam::new(fiber.waist_um * 1e-6, lambda).map_err(input)?;
    let mode = FiberMode::new(fiber.name.clone(), fiber_beam)
        .with_discount(fiber.overlap_discount.unwrap_or(1.0))
        .map_err(input)?;
    let solved = cavity_length_for_waist(fiber_beam.waist_radius, rc, lambda).map_err(input)?;
    let length = cavity
        .cavity_length_mm
        .map(|d| d * 1e-3)
        .unwrap_or(solved.primary());
    let geometry = CavityGeometry::plano_concave(rc, length).map_err(input)?;
    let cavity_waist = hemispherical_waist(&geometry, lambda).map_err(input)?;
    let cavity_beam = GaussianBeam::new(cavity_waist, lambda).map_err(input)?;
    let crystal_beam =
        GaussianBeam::with_index(cavity_waist, lambda, cavity.crystal_index()).map_err(input)?;
    Ok(vec![
        fiber.name.as_str().into(),
        fiber.waist_um.into(),
        (solved.primary() * 1e3).into(),
        (solved.near_planar * 1e3).into(),
        ((rc - solved.primary()) * 1e9).into(),
        (length * 1e3).into(),
        (cavity_waist * 1e6).into(),
        (rayleigh_range(&cavity_beam) * 1e6).into(),
        (confocal_crystal_length(&crystal_beam) * 1e6).into(),
        (beam_radius_at(&cavity_beam, length) * 1e6).into(),
        paraxial_figure_of_merit(&geometry, &cavity_beam).into(),
        mode.coupling_to(&cavity_beam).map_err(input)?.into(),
    ])
}

pub fn opo_curve(scenario: &Scenario, sweep: Option<&Sweep>) -> Result<CommandOutput, CliError> {
    let opo = section(&scenario.opo, "opo", "opo-curve")?;
    let params = opo.params()?;
    let powers_mw = match sweep {
        None => opo.pump_powers_mw.clone(),
        Some(s) if s.key == "pump_power_mw" => s.values(),
        Some(s) => return Err(unsupported_sweep("opo-curve", s, &["pump_power_mw"])),
    };
    if powers_mw.is_empty() {
        return Err(CliError::input("opo-curve: empty pump power sweep"));
    }
    let c_eff = params.effective_efficiency().map_err(CliError::input)?;
    let omega = params.normalized_frequency();
    let mut table = ResultTable::new(
        "opo_curve",
        &[
            ("pump_power_mw", "mW"),
            ("pump_ratio", "1"),
            ("squeezing_db", "dB"),
            ("antisqueezing_db", "dB"),
            ("status", "-"),
        ],
    );
    let mut warnings = Vec::new();
    for &p in &powers_mw {
        let x = pump_ratio(p * 1e-3, params.threshold_power)
            .map_err(|e| CliError::input(format!("opo-curve: {e}")))?;
        let (s, a, status) = match squeezing_spectrum(c_eff, x, omega) {
            Ok(pair) if x < 1.0 => (pair.squeezing_db(), pair.antisqueezing_db(), "ok"),
            Ok(pair) => (pair.squeezing_db(), pair.antisqueezing_db(), "at_threshold"),
            Err(OpoError::AntisqueezingDivergence { squeezed }) => {
                (10.0 * squeezed.log10(), f64::INFINITY, "at_threshold")
            }
            Err(OpoError::AboveThreshold { .. }) => (f64::NAN, f64::NAN, "above_threshold"),
            Err(e) => return Err(CliError::Computation(e.to_string())),
        };
        if status != "ok" {
            warnings.push(format!("pump power {p} mW: {status}"));
        }
        table.push(vec![p.into(), x.into(), s.into(), a.into(), status.into()]);
    }
    table.note(format!(
        "c_eff = {c_eff:.6}, bandwidth = {:.6e} Hz, omega = {omega:.6e}",
        params.bandwidth()
    ));
    let mut tables = vec![table];

    if let Some(angles) = &opo.trace_angles_deg {
        let p_mw = opo
            .trace_pump_power_mw
            .ok_or_else(|| CliError::input("opo: trace_angles_deg needs trace_pump_power_mw"))?;
        let pair = params
            .spectrum_at(p_mw * 1e-3)
            .map_err(|e| CliError::Computation(format!("trace: {e}")))?;
        let mut trace = ResultTable::new(
            "opo_trace",
            &[
                ("lo_phase_deg", "deg"),
                ("variance", "snu"),
                ("variance_db", "dB"),
            ],
        );
        for &deg in angles {
            let v = homodyne_trace(&pair, deg.to_radians());
            trace.push(vec![deg.into(), v.into(), (10.0 * v.log10()).into()]);
        }
        trace.note(format!("pump power {p_mw} mW"));
        tables.push(trace);
    }
    Ok(CommandOutput {
        tables,
        warnings,
        exit_code: exit::SUCCESS,
    })
}

/// Parses `power_mW, squeezing_db, antisqueezing_db[, weight]` rows. An empty
/// antisqueezing field means that quadrature was not measured. A first row
/// that does not parse as numbers is taken as a header.
pub fn parse_fit_data(text: &str) -> Result<Vec<FitPoint>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("data: {e}")))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |what: &str| CliError::input(format!("data line {line}: {what}"));
        if record.len() < 3 || record.len() > 4 {
            return Err(bad("expected 3 or 4 columns"));
        }
        let num = |i: usize| -> Result<Option<f64>, CliError> {
            match record.get(i).unwrap_or("") {
                "" => Ok(None),
                s => s
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| bad(&format!("cannot parse {s:?} as a number"))),
            }
        };
        let power = match num(0) {
            Ok(Some(p)) => p,
            Ok(None) => return Err(bad("missing pump power")),
            Err(_) if index == 0 => continue,
            Err(e) => return Err(e),
        };
        let squeezing = num(1)?;
        let antisqueezing = num(2)?;
        let weight = if record.len() == 4 {
            num(3)?.unwrap_or(1.0)
        } else {
            1.0
        };
        if squeezing.is_none() && antisqueezing.is_none() {
            return Err(bad("no quadrature value"));
        }
        if power.is_nan() || power <= 0.0 {
            return Err(bad("pump power must be > 0"));
        }
        points.push(FitPoint {
            pump_power: power * 1e-3,
            squeezing_db: squeezing,
            antisqueezing_db: antisqueezing,
            weight,
        });
    }
    Ok(points)
}

pub fn fit(
    scenario: &Scenario,
    data: &str,
    sweep: Option<&Sweep>,
) -> Result<CommandOutput, CliError> {
    if let Some(s) = sweep {
        return Err(unsupported_sweep("fit", s, &[]));
    }
    let section = section(&scenario.fit, "fit", "fit")?;
    let fixed = FitFixed {
        sideband_frequency: section.sideband_frequency_mhz * 1e6,
        bandwidth: section.bandwidth_mhz * 1e6,
    };
    let points = parse_fit_data(data)?;
    let result = fit_opo_curve(&points, fixed).map_err(|e| CliError::input(format!("fit: {e}")))?;
    let status = if result.on_boundary {
        "boundary"
    } else if !result.converged {
        "not_converged"
    } else {
        "ok"
    };
    let mut params = ResultTable::new(
        "fit",
        &[
            ("c_eff", "1"),
            ("threshold_power_mw", "mW"),
            ("rms_residual_db", "dB"),
            ("points", "1"),
            ("status", "-"),
        ],
    );
    params.push(vec![
        result.c_eff.into(),
        (result.threshold_power * 1e3).into(),
        result.rms_residual_db.into(),
        points.len().into(),
        status.into(),
    ]);
    let mut warnings = Vec::new();
    if result.on_boundary {
        let msg = "fit optimum lies on the search boundary; parameters are poorly constrained";
        params.note(msg);
        warnings.push(msg.to_string());
    }

    let curve_powers: Vec<f64> = match &section.curve_powers_mw {
        Some(p) => p.clone(),
        None => points.iter().map(|p| p.pump_power * 1e3).collect(),
    };
    let mut curve = ResultTable::new(
        "fit_curve",
        &[
            ("pump_power_mw", "mW"),
            ("squeezing_db", "dB"),
            ("antisqueezing_db", "dB"),
        ],
    );
    for p in curve_powers {
        let (s, a) = fitted_curve(&result, fixed, p * 1e-3).unwrap_or((f64::NAN, f64::NAN));
        curve.push(vec![p.into(), s.into(), a.into()]);
    }
    Ok(CommandOutput {
        tables: vec![params, curve],
        warnings,
        exit_code: exit::SUCCESS,
    })
}

const TIERS: [Tier; 3] = [Tier::Detection, Tier::Source, Tier::Coupling];

fn tier_label(t: Tier) -> &'static str {
    match t {
        Tier::Detection => "1",
        Tier::Source => "2",
        Tier::Coupling => "3",
    }
}

/// Per setup and tier: Ok((squeezing_db, antisqueezing_db)) or the failure message.
type TierResults = Vec<Result<(f64, f64), String>>;

fn run_tiers(input: &CorrectionInput) -> TierResults {
    match correction_pipeline(
        &input.record,
        &input.detection,
        &input.source,
        &input.coupling,
    ) {
        Ok(t) => TIERS
            .iter()
            .map(|&tier| {
                let p = t.tier(tier);
                Ok((p.squeezing_db(), p.antisqueezing_db()))
            })
            .collect(),
        Err(e) => {
            let failed = match &e {
                sqzkit_core::LossError::Pipeline { tier, .. } => *tier,
                _ => Tier::Detection,
            };
            // Tiers before the failing one are still meaningful.
            let partial = correction_prefix(input, failed);
            TIERS
                .iter()
                .enumerate()
                .map(|(i, _)| partial.get(i).copied().ok_or_else(|| e.to_string()))
                .collect()
        }
    }
}

fn correction_prefix(input: &CorrectionInput, failed: Tier) -> Vec<(f64, f64)> {
    let none = LossChain::default();
    let chains: Vec<(&LossChain, &LossChain, &LossChain)> = match failed {
        Tier::Detection => vec![],
        Tier::Source => vec![(&input.detection, &none, &none)],
        Tier::Coupling => vec![
            (&input.detection, &none, &none),
            (&input.detection, &input.source, &none),
        ],
    };
    chains
        .into_iter()
        .filter_map(|(d, s, c)| correction_pipeline(&input.record, d, s, c).ok())
        .map(|t| (t.coupling.squeezing_db(), t.coupling.antisqueezing_db()))
        .collect()
}

fn with_offset(input: &CorrectionInput, stage: &str, offset: f64) -> Option<CorrectionInput> {
    let mut out = input.clone();
    let mut found = false;
    for chain in [&mut out.detection, &mut out.source, &mut out.coupling] {
        if let Some(s) = chain.stage_mut(stage) {
            s.value = (s.value + offset).clamp(1e-12, 1.0);
            found = true;
        }
    }
    found.then_some(out)
}

pub fn loss_correct(scenario: &Scenario, sweep: Option<&Sweep>) -> Result<CommandOutput, CliError> {
    let losses = section(&scenario.losses, "losses", "loss-correct")?;
    let inputs = losses.inputs()?;
    run_loss_correct(&inputs, sweep)
}

/// `sweep`, when given, names a loss stage and additive transmission offsets.
pub fn run_loss_correct(
    inputs: &[CorrectionInput],
    sweep: Option<&Sweep>,
) -> Result<CommandOutput, CliError> {
    let mut columns = vec![
        ("setup", "-"),
        ("tier", "1"),
        ("squeezing_db", "dB"),
        ("antisqueezing_db", "dB"),
    ];
    if sweep.is_some() {
        columns.extend([
            ("squeezing_db_min", "dB"),
            ("squeezing_db_max", "dB"),
            ("antisqueezing_db_min", "dB"),
            ("antisqueezing_db_max", "dB"),
        ]);
    }
    columns.push(("status", "-"));
    let mut table = ResultTable::new("loss_correct", &columns);
    if let Some(s) = sweep {
        let known = inputs.iter().any(|i| {
            [&i.detection, &i.source, &i.coupling]
                .iter()
                .any(|c| c.stages.iter().any(|st| st.name == s.key))
        });
        if !known {
            return Err(CliError::input(format!(
                "loss-correct: no loss stage named {:?}",
                s.key
            )));
        }
        table.note(format!(
            "sweep: stage {} transmission offset {}..{} in {} steps, clamped to (0, 1]",
            s.key, s.lo, s.hi, s.count
        ));
    }

    let mut warnings = Vec::new();
    let mut failed_rows = 0usize;
    for input in inputs {
        let nominal = run_tiers(input);
        let swept: Vec<TierResults> = sweep
            .map(|s| {
                s.values()
                    .into_iter()
                    .filter_map(|off| with_offset(input, &s.key, off))
                    .map(|i| run_tiers(&i))
                    .collect()
            })
            .unwrap_or_default();
        for (k, &tier) in TIERS.iter().enumerate() {
            let mut row: Vec<Cell> = vec![
                input.record.setup.as_str().into(),
                Cell::Text(tier_label(tier).into()),
            ];
            let (values, status) = match &nominal[k] {
                Ok(v) => (*v, "ok".to_string()),
                Err(e) => {
                    failed_rows += 1;
                    warnings.push(format!("{}: {e}", input.record.setup));
                    ((f64::NAN, f64::NAN), format!("nonphysical: {e}"))
                }
            };
            row.push(values.0.into());
            row.push(values.1.into());
            if sweep.is_some() {
                let ok: Vec<(f64, f64)> = if swept.is_empty() {
                    nominal[k].iter().copied().collect()
                } else {
                    swept
                        .iter()
                        .filter_map(|r| r[k].as_ref().ok().copied())
                        .collect()
                };
                let fold = |f: fn(&(f64, f64)) -> f64, min: bool| {
                    ok.iter().map(f).fold(
                        if min {
                            f64::INFINITY
                        } else {
                            f64::NEG_INFINITY
                        },
                        |acc, v| {
                            if min {
                                acc.min(v)
                            } else {
                                acc.max(v)
                            }
                        },
                    )
                };
                let (s_min, s_max, a_min, a_max) = if ok.is_empty() {
                    (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
                } else {
                    (
                        fold(|v| v.0, true),
                        fold(|v| v.0, false),
                        fold(|v| v.1, true),
                        fold(|v| v.1, false),
                    )
                };
                row.extend([s_min.into(), s_max.into(), a_min.into(), a_max.into()]);
            }
            row.push(status.into());
            table.push(row);
        }
    }
    let total = inputs.len() * TIERS.len();
    let exit_code = if total > 0 && failed_rows == total {
        exit::COMPUTATION
    } else {
        exit::SUCCESS
    };
    Ok(CommandOutput {
        tables: vec![table],
        warnings,
        exit_code,
    })
}

pub fn network(scenario: &Scenario, sweep: Option<&Sweep>) -> Result<CommandOutput, CliError> {
    if let Some(s) = sweep {
        return Err(unsupported_sweep("network", s, &[]));
    }
    let section = section(&scenario.network, "network", "network")?;
    let net = section.scenario()?;
    let out = run_scenario(&net).map_err(|e| CliError::Computation(format!("network: {e}")))?;

    let mut homodyne = ResultTable::new(
        "network_homodyne",
        &[
            ("mode", "1"),
            ("angle_rad", "rad"),
            ("variance", "snu"),
            ("variance_db", "dB"),
        ],
    );
    for (m, v) in &out.homodyne {
        homodyne.push(vec![
            m.mode.into(),
            m.angle.into(),
            (*v).into(),
            (10.0 * v.log10()).into(),
        ]);
    }
    let mut duan = ResultTable::new(
        "network_duan",
        &[
            ("mode_i", "1"),
            ("mode_j", "1"),
            ("duan", "snu"),
            ("duan_phase_optimized", "snu"),
            ("entangled", "-"),
        ],
    );
    for e in &out.duan {
        duan.push(vec![
            e.i.into(),
            e.j.into(),
            e.value.into(),
            e.optimal_value.into(),
            e.entangled().into(),
        ]);
    }
    duan.note("separable states satisfy duan >= 4");

    let n = out.state.mode_count();
    let names: Vec<String> = (1..=n)
        .flat_map(|k| [format!("x{k}"), format!("p{k}")])
        .collect();
    let cols: Vec<(&str, &str)> = names.iter().map(|c| (c.as_str(), "snu")).collect();
    let mut cov = ResultTable::new("network_covariance", &cols);
    let matrix = out.state.covariance();
    // Rounding residue from gate products is printed as exact zero.
    let floor = 1e-12 * matrix.amax();
    for r in 0..matrix.nrows() {
        cov.push(
            (0..matrix.ncols())
                .map(|c| {
                    let v = matrix[(r, c)];
                    if v.abs() < floor { 0.0 } else { v }.into()
                })
                .collect(),
        );
    }
    cov.note("shot-noise units: vacuum covariance is the identity");

    Ok(CommandOutput::ok(vec![homodyne, duan, cov]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s = Sweep::parse("crystal_reflection=-0.02:0.02:5").unwrap();
        assert_eq!(s.key, "crystal_reflection");
        let v = s.values();
        assert_eq!(v.len(), 5);
        assert!((v[0] + 0.02).abs() < 1e-15 && (v[4] - 0.02).abs() < 1e-15);
        assert_eq!(Sweep::parse("k=1:2:1").unwrap().values(), vec![1.0]);
        for bad in ["k", "k=1:2", "=1:2:3", "k=a:2:3", "k=1:2:0"] {
            assert!(Sweep::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn fit_data_parsing() {
        let pts = parse_fit_data(
            "power_mW,squeezing_db,antisqueezing_db,weight\n# c\n70,-0.56,1.05\n100,-0.9,,2\n",
        )
        .unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].antisqueezing_db, None);
        assert_eq!(pts[1].weight, 2.0);
        assert!((pts[0].pump_power - 0.07).abs() < 1e-15);
        let err = parse_fit_data("70,-0.56,1.05\n80,abc,1.0\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_fit_data("70,-0.5\n").is_err());
    }
}

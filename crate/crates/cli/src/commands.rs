use crate::args::*;
use crate::config::provenance;
use crate::output::{
    check_dir, heatmap_script, line_script, num, region_script, script_path, write_atomic,
    write_csv, Table,
};
use anyhow::{bail, Context, Result};
use golay_dfcw::channel::{
    ambiguity, classical_pair_rmse, doppler_grid, rmse_experiment, RmseConfig, RmseCurve,
};
use golay_dfcw::chips::{
    apply_fading, formula_mirror_hops, hop_mirror_check, hop_sequence, synthesize,
    synthesize_mirror, ChipSpec, SampledWaveform,
};
use golay_dfcw::correlate::{magnitude_db, xcorr_full, ComplexSequence};
use golay_dfcw::golay::{generate_golay_pair, golay_pair_of_length, mate_pair, BinaryCode};
use golay_dfcw::receiver::{
    build_code, receiver, region_report, AssembledCode, Region, RegionReport,
};
use golay_dfcw::sets::{
    best_candidate_set, build_set, combined_set, mate_set, pairwise_cross_peaks, set_metrics,
    CodeSet, CodeSetMetrics, PairOrigin,
};
use num_complex::Complex64;
use serde::Serialize;
use std::path::{Path, PathBuf};

const REGION_LABELS: [&str; 5] = ["XCORR_L", "ZERO_L", "MAIN", "ZERO_R", "XCORR_R"];

/// Values quoted from the literature for the same two metrics.
const QUOTED_TABLE1: [(&str, f64, f64); 3] = [
    ("Deng polyphase set (length 128, L=3)", -20.9606, -19.1525),
    (
        "Deng discrete-frequency set (128 frequencies, L=3)",
        -32.2641,
        -32.2522,
    ),
    ("proposed set N_g=16 N=32 L=4 (target)", -39.8280, -37.9926),
];

pub fn run(command: &Command) -> Result<()> {
    let name = command.name();
    match command {
        Command::GenGolay(a) => gen_golay(name, a),
        Command::GenChip(a) => gen_chip(name, a),
        Command::GenCode(a) => gen_code(name, a),
        Command::Acf(a) => acf(name, a),
        Command::Receiver(a) => receiver_cmd(name, a, false),
        Command::MateXcorr(a) => receiver_cmd(name, a, true),
        Command::GenSet(a) => gen_set(name, a),
        Command::SetMetrics(a) => set_metrics_cmd(name, a),
        Command::BestSet(a) => best_set(name, a),
        Command::FadingDemo(a) => fading_demo(name, a),
        Command::RmseSim(a) => rmse_sim(name, a),
        Command::Ambiguity(a) => ambiguity_cmd(name, a),
        Command::Table1(a) => table1(name, a),
    }
}

fn target(out: &OutArgs, default_name: &str) -> Result<PathBuf> {
    check_dir(&out.out_dir)?;
    Ok(out
        .out_dir
        .join(out.output.as_deref().unwrap_or(default_name)))
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

fn emit<T: Serialize>(path: &Path, name: &str, args: &T, table: &Table) -> Result<()> {
    write_csv(path, &provenance(name, args)?, table)?;
    announce(path);
    Ok(())
}

fn emit_script(csv: &Path, script: String) -> Result<()> {
    let p = script_path(csv);
    write_atomic(&p, script.as_bytes())?;
    announce(&p);
    Ok(())
}

fn pair_for(n_g: usize, mate: bool) -> Result<(BinaryCode, BinaryCode)> {
    let (a, b) = golay_pair_of_length(n_g)?;
    Ok(if mate { mate_pair(&a, &b)? } else { (a, b) })
}

fn chips(
    spec: &ChipSpec,
    fading: Option<&golay_dfcw::chips::FadingProfile>,
) -> Result<(SampledWaveform, SampledWaveform)> {
    Ok(match fading {
        Some(p) => (apply_fading(spec, p, false)?, apply_fading(spec, p, true)?),
        None => (synthesize(spec), synthesize_mirror(spec)),
    })
}

fn gen_golay(name: &str, a: &GenGolayArgs) -> Result<()> {
    let path = target(&a.out, "golay_pair.txt")?;
    let (x, y) = generate_golay_pair(a.exponent)?;
    let (x, y) = if a.mate { mate_pair(&x, &y)? } else { (x, y) };
    let text = format!("{}\n{}\n{}\n", provenance(name, a)?, x, y);
    write_atomic(&path, text.as_bytes())?;
    announce(&path);
    Ok(())
}

fn gen_chip(name: &str, a: &GenChipArgs) -> Result<()> {
    let path = target(&a.out, "chip.csv")?;
    let spec = a.chip.spec()?;
    let hops = hop_sequence(&spec);
    let mirror_hops = formula_mirror_hops(&spec);
    let u = synthesize(&spec);
    let d = synthesize_mirror(&spec);
    let ns = spec.samples_per_subpulse();
    let mut t = Table::new(&[
        "sample",
        "subpulse",
        "hop",
        "mirror_hop",
        "u_re",
        "u_im",
        "d_re",
        "d_im",
    ]);
    for m in 0..u.len() {
        t.push(vec![
            m.to_string(),
            (m / ns).to_string(),
            hops[m / ns].to_string(),
            mirror_hops[m / ns].to_string(),
            num(u.samples[m].re),
            num(u.samples[m].im),
            num(d.samples[m].re),
            num(d.samples[m].im),
        ]);
    }
    emit(&path, name, a, &t)?;
    emit_script(
        &path,
        line_script(
            &path,
            "chip and mirror, real parts",
            "sample",
            "amplitude",
            &[(5, "u"), (7, "d")],
        ),
    )?;
    let check = hop_mirror_check(&spec);
    println!("hops: {hops:?}");
    println!(
        "mirror check: hops {} , one-sample-shift mismatches {}",
        if check.hops_match { "match" } else { "differ" },
        check.shifted_mismatches
    );
    Ok(())
}

fn gen_code(name: &str, a: &CodeArgs) -> Result<()> {
    let path = target(&a.out, "code.csv")?;
    let spec = a.chip.spec()?;
    let (x, y) = pair_for(a.ng, a.mate)?;
    let (u, d) = chips(&spec, None)?;
    let s = build_code(&x, &y, &u, &d)?;
    let mut t = Table::new(&["sample", "re", "im"]);
    for (m, v) in s.samples().iter().enumerate() {
        t.push(vec![m.to_string(), num(v.re), num(v.im)]);
    }
    emit(&path, name, a, &t)
}

/// Reads the `re`/`im` columns of a waveform CSV, skipping `#` lines.
pub fn read_waveform(path: &Path) -> Result<Vec<Complex64>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let headers = r.headers()?.clone();
    let col = |n: &str| {
        headers
            .iter()
            .position(|h| h == n)
            .with_context(|| format!("{} has no {n:?} column", path.display()))
    };
    let (re, im) = (col("re")?, col("im")?);
    let mut out = vec![];
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |c: usize| -> Result<f64> {
            rec.get(c)
                .unwrap_or("")
                .trim()
                .parse()
                .with_context(|| format!("{} row {}: bad number", path.display(), i + 1))
        };
        out.push(Complex64::new(parse(re)?, parse(im)?));
    }
    if out.is_empty() {
        bail!("{} holds no samples", path.display());
    }
    Ok(out)
}

/// Aperiodic ACF divided by the zero-lag energy.
pub fn normalized_acf(x: &[Complex64]) -> Result<ComplexSequence> {
    let r = xcorr_full(x, x)?;
    let e = r.values[r.zero_lag_index].re;
    if e.is_nan() || e <= 0.0 {
        bail!("waveform has zero energy");
    }
    Ok(r.scaled(1.0 / e))
}

fn acf(name: &str, a: &AcfArgs) -> Result<()> {
    let path = target(&a.out, "acf.csv")?;
    let x = read_waveform(&a.input)?;
    let r = normalized_acf(&x)?;
    let mut t = Table::new(&["lag", "re", "im", "magnitude", "magnitude_db"]);
    for (i, v) in r.values.iter().enumerate() {
        t.push(vec![
            (i as isize - r.zero_lag_index as isize).to_string(),
            num(v.re),
            num(v.im),
            num(v.norm()),
            num(magnitude_db(v.norm())),
        ]);
    }
    emit(&path, name, a, &t)?;
    emit_script(
        &path,
        line_script(
            &path,
            "normalized autocorrelation",
            "lag",
            "magnitude (dB)",
            &[(5, "|R|")],
        ),
    )
}

fn region_table(out: &ComplexSequence, rep: &RegionReport, block: usize) -> Table {
    let mut t = Table::new(&["index", "lag", "magnitude", "magnitude_db", "region"]);
    for (i, v) in out.values.iter().enumerate() {
        let region = rep.region_of(i).map(Region::label).unwrap_or("");
        t.push(vec![
            i.to_string(),
            (i as isize - 3 * block as isize).to_string(),
            num(v.norm()),
            num(magnitude_db(v.norm())),
            region.to_string(),
        ]);
    }
    t
}

fn print_report(rep: &RegionReport, against_mate: bool) {
    println!(
        "mainlobe index {} peak {:.6}",
        rep.mainlobe_index, rep.mainlobe_peak
    );
    println!(
        "zero-region peak {:.2} dB",
        magnitude_db(rep.zero_region_peak)
    );
    println!(
        "cross-region peak {:.2} dB (left {:.2}, right {:.2})",
        magnitude_db(rep.cross_region_peak),
        magnitude_db(rep.cross_left_peak),
        magnitude_db(rep.cross_right_peak)
    );
    if against_mate {
        println!("middle-region peak {:.2} dB", magnitude_db(rep.middle_peak));
    }
}

fn receiver_cmd(name: &str, a: &ReceiverArgs, against_mate: bool) -> Result<()> {
    let path = target(&a.out, &format!("{name}.csv"))?;
    let spec = a.chip.spec()?;
    let profile = a.fading.profile(spec.num_subpulses())?;
    let (u, d) = chips(&spec, profile.as_ref())?;
    let (x, y) = pair_for(a.ng, false)?;
    let s = build_code(&x, &y, &u, &d)?;
    let refs: AssembledCode = if against_mate {
        let (c, e) = mate_pair(&x, &y)?;
        build_code(&c, &e, &u, &d)?
    } else {
        s.clone()
    };
    let c = spec.chip_len();
    let out = receiver(s.samples(), refs.a_wave(), refs.b_wave(), a.ng, c)?.combined;
    let rep = region_report(&out, a.ng, c)?;
    emit(&path, name, a, &region_table(&out, &rep, a.ng * c))?;
    let title = if against_mate {
        "pair code through the receiver matched to its mate"
    } else {
        "receiver output"
    };
    emit_script(
        &path,
        region_script(
            &path,
            title,
            &rep.region_boundaries,
            &REGION_LABELS,
            &[(4, "|R| (dB)")],
        ),
    )?;
    print_report(&rep, against_mate);
    Ok(())
}

fn build_kind(args: &SetArgs, kind: SetKind) -> Result<CodeSet> {
    let p = args.params()?;
    Ok(match kind {
        SetKind::Pair => build_set(&p, args.l)?,
        SetKind::Mate => mate_set(&build_set(&p, args.l)?)?,
        SetKind::Combined => {
            let pair = build_set(&p, args.l)?;
            combined_set(&pair, &mate_set(&pair)?)?
        }
        SetKind::Best => best_candidate_set(&p, args.l)?,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    provenance: String,
    kind: SetKind,
    set: &'a CodeSet,
    hops: Vec<Vec<i64>>,
}

fn origin_label(o: PairOrigin) -> &'static str {
    match o {
        PairOrigin::Pair => "pair",
        PairOrigin::Mate => "mate",
    }
}

fn gen_set(name: &str, a: &GenSetArgs) -> Result<()> {
    let path = target(&a.set.out, "set.json")?;
    let set = build_kind(&a.set, a.kind)?;
    let hops = set
        .members
        .iter()
        .map(|m| Ok(hop_sequence(&set.params.chip(m.slope)?)))
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest {
        provenance: provenance(name, a)?,
        kind: a.kind,
        set: &set,
        hops,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    announce(&path);
    for (i, m) in set.members.iter().enumerate() {
        println!(
            "member {i}: slope {:.6} {}",
            m.slope,
            origin_label(m.origin)
        );
    }
    Ok(())
}

fn print_metrics(label: &str, m: &CodeSetMetrics) {
    println!(
        "{label}: avg ACF peak {:.4} dB, MCCP {:.4} dB, ACCP {:.4} dB",
        m.avg_acf_peak_db(),
        m.mccp_db(),
        m.accp_db()
    );
}

fn set_metrics_cmd(name: &str, a: &GenSetArgs) -> Result<()> {
    let path = target(&a.set.out, "set_metrics.csv")?;
    let set = build_kind(&a.set, a.kind)?;
    let m = set_metrics(&set)?;
    let cross = pairwise_cross_peaks(&set)?;
    let mut t = Table::new(&["quantity", "i", "j", "value", "value_db"]);
    for (i, v) in m.asp.iter().enumerate() {
        t.push(vec![
            "asp".into(),
            i.to_string(),
            i.to_string(),
            num(*v),
            num(magnitude_db(*v)),
        ]);
    }
    for ((i, j), v) in &cross {
        t.push(vec![
            "cross_peak".into(),
            i.to_string(),
            j.to_string(),
            num(*v),
            num(magnitude_db(*v)),
        ]);
    }
    for (q, v) in [
        ("avg_acf_peak", m.avg_acf_peak),
        ("mccp", m.mccp),
        ("accp", m.accp),
    ] {
        t.push(vec![
            q.into(),
            String::new(),
            String::new(),
            num(v),
            num(magnitude_db(v)),
        ]);
    }
    emit(&path, name, a, &t)?;
    print_metrics(&format!("{:?} set", a.kind).to_lowercase(), &m);
    Ok(())
}

fn best_set(name: &str, a: &SetArgs) -> Result<()> {
    let path = target(&a.out, "best_set.csv")?;
    let mut t = Table::new(&[
        "set",
        "members",
        "avg_acf_peak",
        "avg_acf_peak_db",
        "mccp",
        "mccp_db",
        "accp",
        "accp_db",
    ]);
    for kind in [
        SetKind::Pair,
        SetKind::Mate,
        SetKind::Combined,
        SetKind::Best,
    ] {
        let set = build_kind(a, kind)?;
        let m = set_metrics(&set)?;
        let label = format!("{kind:?}").to_lowercase();
        print_metrics(&label, &m);
        t.push(vec![
            label,
            set.len().to_string(),
            num(m.avg_acf_peak),
            num(m.avg_acf_peak_db()),
            num(m.mccp),
            num(m.mccp_db()),
            num(m.accp),
            num(m.accp_db()),
        ]);
    }
    emit(&path, name, a, &t)
}

fn fading_demo(name: &str, a: &FadingDemoArgs) -> Result<()> {
    let path = target(&a.out, "fading_demo.csv")?;
    let spec = a.chip.spec()?;
    let profile = golay_dfcw::chips::FadingProfile::new(a.alpha1, a.alpha2, a.boundary)?;
    let (u, d) = chips(&spec, None)?;
    let (uf, df) = chips(&spec, Some(&profile))?;
    let c = spec.chip_len() as f64;
    let acfs = [&u, &d, &uf, &df]
        .iter()
        .map(|w| Ok(xcorr_full(w.as_slice(), w.as_slice())?.scaled(1.0 / c)))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "lag", "r_u", "r_u_db", "r_d", "r_d_db", "r_uf", "r_uf_db", "r_df", "r_df_db",
    ]);
    let z = acfs[0].zero_lag_index as isize;
    for i in 0..acfs[0].values.len() {
        let mut row = vec![(i as isize - z).to_string()];
        for r in &acfs {
            let v = r.values[i].norm();
            row.push(num(v));
            row.push(num(magnitude_db(v)));
        }
        t.push(row);
    }
    emit(&path, name, a, &t)?;
    emit_script(
        &path,
        line_script(
            &path,
            "chip autocorrelations with and without fading",
            "lag (samples)",
            "normalized magnitude (dB)",
            &[(3, "u"), (5, "d"), (7, "u faded"), (9, "d faded")],
        ),
    )?;
    let (x, y) = pair_for(a.ng, false)?;
    let out = build_code(&x, &y, &uf, &df)?.self_output()?;
    let rep = region_report(&out, a.ng, spec.chip_len())?;
    println!(
        "faded chip ACF peak {:.6} (unfaded 1), faded code zero-region peak {:.2} dB, mainlobe index {}",
        acfs[2].values[acfs[2].zero_lag_index].norm(),
        magnitude_db(rep.zero_region_peak),
        rep.mainlobe_index
    );
    Ok(())
}

fn rmse_sim(name: &str, a: &RmseArgs) -> Result<()> {
    let path = target(&a.out, "rmse.csv")?;
    let spec = a.chip.spec()?;
    let mut cfg = RmseConfig::new(a.snr_grid()?, a.trials, a.seed);
    cfg.fading_range = (a.alpha_min, a.alpha_max);
    cfg.fading_boundary = a.boundary;
    cfg.reference = a.reference.into();
    cfg.snr_reference = a.snr_reference.into();
    cfg.validate()?;
    let run = |c: &RmseConfig| -> Result<RmseCurve> {
        Ok(match a.baseline {
            Baseline::Proposed => rmse_experiment(&spec, a.ng, c)?,
            Baseline::Classical => classical_pair_rmse(a.ng, a.chip_len.unwrap_or(a.chip.n), c)?,
        })
    };
    let off = run(&cfg)?;
    let on = run(&cfg.with_fading(true))?;
    let mut t = Table::new(&["snr_db", "rmse_fading_off", "rmse_fading_on"]);
    for (p, q) in off.points.iter().zip(&on.points) {
        t.push(vec![num(p.snr_db), num(p.rmse), num(q.rmse)]);
        println!("{:>6.1} dB  off {:.4}  on {:.4}", p.snr_db, p.rmse, q.rmse);
    }
    emit(&path, name, a, &t)?;
    emit_script(
        &path,
        line_script(
            &path,
            "RMSE of the mainlobe position",
            "SNR (dB)",
            "RMSE (chips)",
            &[(2, "no fading"), (3, "fading")],
        ),
    )
}

fn ambiguity_cmd(name: &str, a: &AmbiguityArgs) -> Result<()> {
    let path = target(&a.out, "ambiguity.csv")?;
    let spec = a.chip.spec()?;
    if a.fd_count == 0 || a.fd_min.is_nan() || a.fd_max.is_nan() || a.fd_max < a.fd_min {
        bail!("Doppler grid needs fd-count >= 1 and fd-max >= fd-min");
    }
    let step = a.lag_step.unwrap_or((spec.chip_len() / 8).max(1));
    if step == 0 {
        bail!("lag-step must be at least 1");
    }
    let (x, y) = pair_for(a.ng, false)?;
    let (u, d) = chips(&spec, None)?;
    let s = build_code(&x, &y, &u, &d)?;
    let grid = doppler_grid(a.fd_min, a.fd_max, a.fd_count);
    let surf = ambiguity(&s, &grid)?;
    let mut t = Table::new(&["fd_T", "lag_index", "magnitude", "magnitude_db"]);
    for (fd, row) in surf.doppler_grid.iter().zip(&surf.magnitudes) {
        for (i, v) in row.iter().enumerate().step_by(step) {
            t.push(vec![
                num(*fd),
                i.to_string(),
                num(*v),
                num(magnitude_db(*v)),
            ]);
        }
        let seq = ComplexSequence {
            values: row.iter().map(|&m| Complex64::new(m, 0.0)).collect(),
            zero_lag_index: 3 * a.ng * spec.chip_len(),
        };
        let rep = region_report(&seq, a.ng, spec.chip_len())?;
        println!(
            "f_d T {fd:+.4}: peak {:.4}, zero-region peak {:.2} dB",
            rep.mainlobe_peak,
            magnitude_db(rep.zero_region_peak)
        );
    }
    emit(&path, name, a, &t)?;
    emit_script(
        &path,
        heatmap_script(&path, "delay-Doppler ambiguity", 1, 2, 4),
    )
}

fn table1(name: &str, a: &Table1Args) -> Result<()> {
    let path = target(&a.set.out, "table1.csv")?;
    let set = build_set(&a.set.params()?, a.set.l)?;
    let m = set_metrics(&set)?;
    let mut t = Table::new(&["code_set", "avg_acf_peak_db", "accp_db", "source"]);
    println!(
        "{:<52} {:>14} {:>14}  source",
        "code set", "avg ACF (dB)", "ACCP (dB)"
    );
    for (label, acf, accp) in QUOTED_TABLE1 {
        println!("{label:<52} {acf:>14.4} {accp:>14.4}  quoted");
        t.push(vec![
            label.into(),
            format!("{acf:.4}"),
            format!("{accp:.4}"),
            "quoted".into(),
        ]);
    }
    let label = format!(
        "this run: {} N_g={} N={} L={} k={}",
        a.set.family, a.set.ng, a.set.n, a.set.l, a.set.k
    );
    println!(
        "{label:<52} {:>14.4} {:>14.4}  computed",
        m.avg_acf_peak_db(),
        m.accp_db()
    );
    t.push(vec![
        label,
        num(m.avg_acf_peak_db()),
        num(m.accp_db()),
        "computed".into(),
    ]);
    emit(&path, name, a, &t)
}

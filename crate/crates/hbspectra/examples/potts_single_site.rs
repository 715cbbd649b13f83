//! Single-site dynamics for spin systems: Ising, Potts, and proper
//! colorings, all certified free of negative eigenvalues.
//!
//! ```bash
//! cargo run -p hbspectra --example potts_single_site
//! ```

use hbspectra::models::{build_spin_heatbath, EnumerationCaps, Graph, SpinSystem};
use hbspectra::rat::{format_rationals, rat, rat_int};
use hbspectra::spectral::{certify_psd, mixing_time_bound, DEFAULT_PSD_TOLERANCE};
use hbspectra::{build_chain, validate_spec};

fn main() -> hbspectra::Result<()> {
    let caps = EnumerationCaps::default();

    // Ising on a single edge with w = e^beta = 2: aligned states get
    // double weight; the chain resamples one endpoint at a time.
    let sys = SpinSystem::ising(Graph::path(2)?, rat_int(2))?;
    let spec = build_spin_heatbath(&sys, &caps)?;
    println!("single-edge Ising states: {:?}", spec.space().labels());
    println!("pi: [{}]", format_rationals(spec.pi_raw()));
    let p = build_chain(&spec)?;
    println!("P:\n{:?}", p.matrix());

    // Larger systems: Potts with three colors on a path, and proper
    // colorings as a hard-constraint system.
    for (name, sys) in [
        ("potts q=3 on path3, w=2", SpinSystem::potts(Graph::path(3)?, 3, rat_int(2))?),
        ("ising on cycle4, w=3/2", SpinSystem::ising(Graph::cycle(4)?, rat(3, 2))?),
        ("proper 3-colorings of path3", SpinSystem::proper_colorings(Graph::path(3)?, 3)?),
    ] {
        let spec = build_spin_heatbath(&sys, &caps)?;
        assert!(validate_spec(&spec).is_valid());
        let p = build_chain(&spec)?;
        let pi = spec.target()?;
        let report = certify_psd(&p, &pi, DEFAULT_PSD_TOLERANCE)?;
        print!(
            "\n{name}: {} states, lambda_min = {:.2e}, psd = {}",
            p.n(),
            report.lambda_min,
            report.psd
        );
        if let Ok(bound) = mixing_time_bound(&report, &pi, 0.01) {
            print!(", tau(0.01) <= {bound:.2}");
        }
        println!();
    }

    // Hard constraints can freeze the dynamics entirely: proper
    // 2-colorings of a path admit no single-site move at all.
    let frozen = build_spin_heatbath(
        &SpinSystem::proper_colorings(Graph::path(3)?, 2)?,
        &caps,
    )?;
    let p = build_chain(&frozen)?;
    println!("\nproper 2-colorings of path3: P is the identity: {:?}", p.matrix());
    Ok(())
}

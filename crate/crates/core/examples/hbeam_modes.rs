//! Natural frequencies of the built-in H-beam against the measured set.

use fem_evidence::bayes::hbeam_measurements;
use fem_evidence::{fem, presets};

fn main() -> fem_evidence::Result<()> {
    let modal = fem::modal_analysis(&presets::hbeam(), 14)?;
    let measured = hbeam_measurements();
    println!("{:>4} {:>10} {:>10} {:>8}", "mode", "model Hz", "test Hz", "error");
    for (i, f) in modal.frequencies_hz.iter().enumerate() {
        let mode = i + 1;
        match measured.entries.iter().find(|m| m.mode_index == mode) {
            Some(m) => println!(
                "{mode:>4} {f:>10.2} {:>10.2} {:>7.1}%",
                m.frequency_hz,
                100.0 * (f - m.frequency_hz) / m.frequency_hz
            ),
            None => println!("{mode:>4} {f:>10.2}"),
        }
    }
    Ok(())
}

//! Padding audit: a rank-drop witness at p = xi, none at p = xi + 1.

use dlcstc::codegen::{rank_audit_padding, verify_witness};
use dlcstc::{Scheme, SchemeConfig};

fn main() -> dlcstc::Result<()> {
    let cfg = SchemeConfig::new(Scheme::FdCrosstalk);
    let xi = cfg.xi();
    for p in [xi, xi + 1] {
        let r = rank_audit_padding(None, &cfg, p, 200, 1)?;
        println!(
            "p = {p}: {} trials x {} psi pairs, min rank {} / {} (full / truncated), drops {}",
            r.trials, r.psi_pairs, r.min_rank_full, r.min_rank_truncated, r.drop_count
        );
        if let Some(w) = &r.witness {
            println!(
                "  witness: trial {}, psi {:?}, ranks {} -> {}, re-verified: {}",
                w.trial,
                w.psi,
                w.rank_full,
                w.rank_truncated,
                verify_witness(w)?
            );
            println!("  {}", serde_json::to_string(w).expect("witness serializes"));
        }
    }
    Ok(())
}

use pramana_core::claim::Claim;
use pramana_core::engine::{ClaimVerdict, VerifiedFraction};
use pramana_core::policy::Mode;
use pramana_core::{apply_policy, Action, Constitution, TrustLevel, TrustReport, Verdict, VerdictKind};

fn report(trust: TrustLevel, kinds: &[VerdictKind]) -> TrustReport {
    TrustReport {
        response_id: "00".into(),
        compliant: true,
        claims: kinds
            .iter()
            .enumerate()
            .map(|(i, &k)| ClaimVerdict {
                claim: Claim::ungrounded(&format!("claim {i}")),
                verdict: Verdict::new(k, format!("detail {i}")),
            })
            .collect(),
        trust,
        verified_fraction: VerifiedFraction { verified: 0, checkable: 0 },
        deterministic_failures: 0,
        elapsed_ms: 0.0,
    }
}

#[test]
fn action_table_over_every_level_and_mode() {
    use Action::*;
    use TrustLevel::*;
    let expected = [
        (Mode::Standard, [Pass, Pass, Warn, Warn, Pass]),
        (Mode::Paranoid, [Pass, Warn, Block, Block, Block]),
        (Mode::Permissive, [Pass, Pass, Pass, Warn, Pass]),
    ];
    for (mode, row) in expected {
        let c = Constitution::preset(mode);
        for (level, want) in [FullyVerified, MostlyVerified, Partial, Unreliable, Ungrounded].into_iter().zip(row) {
            let d = apply_policy(&report(level, &[]), &c);
            assert_eq!(d.action, want, "{mode:?} {level:?}");
            assert_eq!(d.trust, level);
        }
    }
}

#[test]
fn paranoid_is_never_laxer_than_standard() {
    let p = Constitution::preset(Mode::Paranoid);
    let s = Constitution::preset(Mode::Standard);
    for level in TrustLevel::ALL {
        let r = report(level, &[]);
        assert!(apply_policy(&r, &p).action >= apply_policy(&r, &s).action, "{level:?}");
    }
}

#[test]
fn annotations_name_each_unverified_claim() {
    let r = report(
        TrustLevel::Partial,
        &[VerdictKind::Verified, VerdictKind::Unverifiable, VerdictKind::PremisesVerified, VerdictKind::SourceUnverified],
    );
    let d = apply_policy(&r, &Constitution::default());
    assert_eq!(d.action, Action::Warn);
    let named: Vec<_> = d.annotations.iter().map(|a| (a.claim.as_str(), a.verdict)).collect();
    assert_eq!(named, [("claim 1", VerdictKind::Unverifiable), ("claim 3", VerdictKind::SourceUnverified)]);
}

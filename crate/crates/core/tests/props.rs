use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use zkphase::attestation::{attest_role, pad_chain, verify_chain};
use zkphase::crypto::{
    encode_doc_message, encode_role_message, kgen, sign, verify, CircuitField, Digest256, Message, PublicKey,
    RefHash, Signature,
};
use zkphase::policy::{chain_policy_eval, phase_policy_eval, ChainPolicyConfig};
use zkphase::sample::{random_tree_spec, sample_phase};
use zkphase::{count_signatures, DocInfo, ProcessSpec, RoleInfo};

const UNIVERSE: u64 = 0x1ff;

fn cfg() -> ChainPolicyConfig {
    ChainPolicyConfig::subset_delegation(UNIVERSE, UNIVERSE)
}

fn doc(bit: u32) -> DocInfo {
    DocInfo { doctype: 1 << bit, identifier: Digest256([3; 32]), reference: Digest256([4; 32]) }
}

fn rinfos(masks: &[u64]) -> Vec<RoleInfo> {
    masks.iter().map(|&m| RoleInfo::new(m)).collect()
}

fn arb_dinfo() -> impl Strategy<Value = DocInfo> {
    (0u32..64, any::<[u8; 32]>(), any::<[u8; 32]>()).prop_map(|(b, i, r)| DocInfo {
        doctype: 1 << b,
        identifier: Digest256(i),
        reference: Digest256(r),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn narrowing_a_passing_author_mask_keeps_it_passing(
        bit in 0u32..9, a in 0u64..=UNIVERSE, p in 0u64..=UNIVERSE, drop in 0u64..=UNIVERSE,
    ) {
        let a = a | 1 << bit;
        let p = p | a;
        prop_assert!(chain_policy_eval(&cfg(), &doc(bit), &rinfos(&[a, p, UNIVERSE])));
        let narrower = (a & !drop) | 1 << bit;
        prop_assert!(chain_policy_eval(&cfg(), &doc(bit), &rinfos(&[narrower, p, UNIVERSE])));
    }

    #[test]
    fn holding_more_than_the_attestor_fails(bit in 0u32..9, p in 0u64..UNIVERSE, extra in 0u32..9) {
        prop_assume!(p >> extra & 1 == 0);
        let a = (p | 1 << bit) | 1 << extra;
        prop_assert!(!chain_policy_eval(&cfg(), &doc(bit), &rinfos(&[a, p, UNIVERSE])));
    }

    #[test]
    fn doc_encoding_is_injective(a in arb_dinfo(), b in arb_dinfo()) {
        prop_assert_eq!(a == b, encode_doc_message(&a) == encode_doc_message(&b));
    }

    #[test]
    fn role_encoding_is_injective_and_disjoint_from_docs(
        s1 in any::<[u8; 32]>(), s2 in any::<[u8; 32]>(), m1 in any::<u64>(), m2 in any::<u64>(), d in arb_dinfo(),
    ) {
        let (k1, k2) = (kgen(Some(s1)).pk, kgen(Some(s2)).pk);
        let (r1, r2) = (RoleInfo::new(m1), RoleInfo::new(m2));
        prop_assert_eq!(
            (k1, r1) == (k2, r2),
            encode_role_message(&k1, &r1) == encode_role_message(&k2, &r2)
        );
        prop_assert_ne!(encode_role_message(&k1, &r1), encode_doc_message(&d));
    }

    #[test]
    fn signatures_are_complete_and_bound_to_message_and_key(
        seed in any::<[u8; 32]>(), other in any::<[u8; 32]>(), elems in prop::collection::vec(any::<u64>(), 1..6), at in any::<prop::sample::Index>(),
    ) {
        prop_assume!(seed != other);
        let kp = kgen(Some(seed));
        let msg = Message::new(elems.iter().map(|&e| CircuitField::from(e)).collect()).unwrap();
        let sig = sign(&kp.sk, &msg).unwrap();
        prop_assert!(verify(&kp.pk, &msg, &sig));
        prop_assert!(!verify(&kgen(Some(other)).pk, &msg, &sig));

        let mut changed = msg.elements().to_vec();
        let i = at.index(changed.len());
        changed[i] += CircuitField::from(1u64);
        prop_assert!(!verify(&kp.pk, &Message::new(changed).unwrap(), &sig));

        prop_assert_eq!(Signature::from_bytes(&sig.to_bytes()).unwrap(), sig);
        prop_assert_eq!(PublicKey::from_hex(&kp.pk.to_hex()).unwrap(), kp.pk);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swapping_two_slots_breaks_the_phase_policy(seed in any::<u64>(), l in 2usize..8, n in 1usize..4) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let spec = random_tree_spec(&mut rng, l, n, RefHash::Sha256);
        let phase = sample_phase(&spec, seed).unwrap();
        let mut dinfos: Vec<DocInfo> = phase.chains.iter().map(|c| c.dinfo).collect();
        prop_assert!(phase_policy_eval(&dinfos, &spec.phase_policy()));
        let (i, j) = ((seed as usize) % l, (seed as usize / 7 + 1) % l);
        prop_assume!(i != j);
        dinfos.swap(i, j);
        prop_assert!(!phase_policy_eval(&dinfos, &spec.phase_policy()));
    }

    #[test]
    fn random_trees_pad_to_l_times_n(seed in any::<u64>(), l in 1usize..10, n in 1usize..5) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let spec = random_tree_spec(&mut rng, l, n, RefHash::Poseidon);
        let phase = sample_phase(&spec, seed).unwrap();
        prop_assert_eq!(count_signatures(&phase.chains).total, l * n);
        prop_assert!(phase.chains.iter().all(|c| verify_chain(c) && c.terminal_pk() == phase.rpk));
    }

    #[test]
    fn spec_toml_roundtrip_preserves_hash(seed in any::<u64>(), l in 1usize..10, n in 1usize..5) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let spec = random_tree_spec(&mut rng, l, n, RefHash::Sha256);
        let back = ProcessSpec::from_toml_str(&spec.to_toml_string()).unwrap();
        prop_assert_eq!(back.content_hash(), spec.content_hash());
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn padding_preserves_validity(seed in any::<[u8; 32]>(), extra in 0usize..4) {
        let root = kgen(Some(seed));
        let rinfo = RoleInfo::new(UNIVERSE);
        let dinfo = doc(0);
        let chain = zkphase::AttestationChain {
            dinfo,
            pk0: root.pk,
            rinfo0: rinfo,
            docsig: zkphase::attestation::attest_doc(&root.sk, dinfo).unwrap().sig,
            steps: vec![],
        };
        let padded = pad_chain(chain, 1 + extra, &root, rinfo).unwrap();
        prop_assert_eq!(padded.signature_count(), 1 + extra);
        prop_assert!(verify_chain(&padded));
        prop_assert!(chain_policy_eval(&cfg(), &dinfo, &padded.rinfos()));
        if extra > 0 {
            let self_att = attest_role(&root.sk, root.pk, rinfo).unwrap();
            prop_assert!(padded.steps.iter().all(|s| s.sig == self_att.sig));
        }
    }
}

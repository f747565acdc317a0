//! One function per subcommand. Each is a thin composition of library calls.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use zkphase::attestation::{
    self, assemble_chains, count_signatures, document_info, verify_chain, ChainFile, DocAttestationFile,
    RoleAttestationFile,
};
use zkphase::bench::{self, BenchConfig};
use zkphase::circuit::{
    cost_breakdown, prove as prove_phase, setup as setup_keys, verify_proof_bytes, ProvingKey, PublicInputs,
    RelationParams, VerificationKey, VerifierExport, Witness,
};
use zkphase::crypto::{document_identifier, kgen, KeyFile, PublicKey};
use zkphase::policy::{chain_policy_eval, phase_policy_eval};
use zkphase::sample::{document_payloads, role_key};
use zkphase::{Error, ProcessSpec, RoleInfo};

use crate::workspace::{ensure_parent, write_file, Workspace};

pub struct Outcome {
    pub ok: bool,
    pub report: Value,
    pub text: String,
}

impl Outcome {
    fn ok(report: Value, text: impl Into<String>) -> Self {
        Self { ok: true, report, text: text.into() }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(Error),
}

impl Failure {
    /// A witness the circuit rejects is a verification failure; anything
    /// else is a usage or I/O problem.
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(Error::Unsatisfied(_)) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

type CmdResult = Result<Outcome, Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn rng_for(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

/// Resolves `--rpk`: a role with a key file, a key file path, or hex.
/// Without a value the root role's key is used.
fn resolve_rpk(ws: &Workspace, spec: &ProcessSpec, arg: Option<&str>) -> Result<PublicKey, Failure> {
    let Some(arg) = arg else {
        return Ok(ws.public_key(&spec.root_role().id)?);
    };
    if ws.key_path(arg).exists() {
        return Ok(ws.public_key(arg)?);
    }
    if Path::new(arg).is_file() {
        return Ok(KeyFile::load(arg)?.public_key()?);
    }
    PublicKey::from_hex(arg).map_err(|e| Failure::Usage(format!("--rpk: {e}")))
}

fn parse_rinfo(spec: &ProcessSpec, s: &str) -> Result<u64, Failure> {
    let bad = |e: String| Failure::Usage(format!("--rinfo `{s}`: {e}"));
    if let Some(b) = s.strip_prefix("0b") {
        return u64::from_str_radix(b, 2).map_err(|e| bad(e.to_string()));
    }
    if let Some(h) = s.strip_prefix("0x") {
        return u64::from_str_radix(h, 16).map_err(|e| bad(e.to_string()));
    }
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let names: Vec<&str> = s.split(',').map(str::trim).filter(|n| !n.is_empty()).collect();
    spec.mask_of(&names).map_err(|e| bad(e.to_string()))
}

pub fn init(ws: &Workspace, spec_path: Option<&Path>) -> CmdResult {
    let spec = match spec_path {
        Some(p) => ProcessSpec::load(p)?,
        None => ProcessSpec::railway_phase1(),
    };
    write_file(&ws.spec_path(), spec.to_toml_string().as_bytes())?;
    let hash = spec.content_hash();
    Ok(Outcome::ok(
        json!({ "spec": spec.name, "spec_hash": hash.to_hex(), "chains": spec.chains, "height": spec.height }),
        format!("wrote {} ({}, hash {hash})\n", ws.spec_path().display(), spec.name),
    ))
}

pub fn keygen(ws: &Workspace, role: &str, seed: Option<u64>) -> CmdResult {
    let kp = match seed {
        Some(s) => role_key(s, role),
        None => kgen(None),
    };
    let path = ws.key_path(role);
    ensure_parent(&path)?;
    KeyFile::from_keypair(&kp).save(&path)?;
    Ok(Outcome::ok(
        json!({ "role": role, "pk": kp.pk.to_hex(), "path": path }),
        format!("{role}: {}\n", kp.pk.to_hex()),
    ))
}

pub fn attest_role(ws: &Workspace, subject: &str, attestor: Option<&str>, rinfo: Option<&str>) -> CmdResult {
    let spec = ws.spec()?;
    let decl = spec
        .role(subject)
        .ok_or_else(|| Failure::Usage(format!("role `{subject}` is not in the spec")))?;
    let attestor = attestor.map(str::to_string).unwrap_or_else(|| {
        decl.parent.clone().unwrap_or_else(|| subject.to_string())
    });
    let permissions = match rinfo {
        Some(s) => parse_rinfo(&spec, s)?,
        None => spec.role_permissions(subject)?,
    };
    let subject_pk = ws.public_key(subject)?;
    let att = attestation::attest_role(&ws.keypair(&attestor)?.sk, subject_pk, RoleInfo::new(permissions))?;
    let path = ws.role_attestation_path(subject);
    ensure_parent(&path)?;
    RoleAttestationFile::new(spec.content_hash(), subject, None, att).save(&path)?;
    Ok(Outcome::ok(
        json!({ "subject": subject, "attestor": attestor, "rinfo": permissions, "path": path }),
        format!("{attestor} -> {subject}: rinfo {permissions:#b}\n"),
    ))
}

pub fn attest_doc(ws: &Workspace, doctype: &str, document: &Path, author: Option<&str>) -> CmdResult {
    let spec = ws.spec()?;
    let slot = spec
        .slot_of(doctype)
        .ok_or_else(|| Failure::Usage(format!("doctype `{doctype}` has no document in the spec")))?;
    let spec_author = &spec.documents[slot].author;
    if let Some(a) = author {
        if a != spec_author {
            return Err(Failure::Usage(format!("{doctype} is authored by `{spec_author}`, not `{a}`")));
        }
    }
    let identifier = document_identifier(&read(document)?);
    let dinfo = document_info(&spec, doctype, identifier, &ws.identifiers(&spec)?)?;
    let att = attestation::attest_doc(&ws.keypair(spec_author)?.sk, dinfo)?;
    let path = ws.doc_attestation_path(doctype);
    ensure_parent(&path)?;
    DocAttestationFile::new(spec.content_hash(), doctype, Some(slot), att).save(&path)?;
    Ok(Outcome::ok(
        json!({
            "doctype": doctype,
            "author": spec_author,
            "identifier": identifier.to_hex(),
            "reference": dinfo.reference.to_hex(),
            "path": path,
        }),
        format!("{doctype} by {spec_author}: id {identifier}\n"),
    ))
}

pub fn build_chains(ws: &Workspace) -> CmdResult {
    let spec = ws.spec()?;
    let set = ws.attestations(&spec)?;
    let chains = assemble_chains(&spec, &set)?;
    let hash = spec.content_hash();
    fs::create_dir_all(ws.chains_dir())?;
    for (slot, (chain, doc)) in chains.iter().zip(&spec.documents).enumerate() {
        ChainFile::new(hash, doc.doctype.clone(), Some(slot), chain.clone()).save(ws.chain_path(slot, &doc.doctype))?;
    }
    let count = count_signatures(&chains);
    Ok(Outcome::ok(
        json!({ "chains": chains.len(), "total_signatures": count.total, "unique_signatures": count.unique }),
        format!(
            "built {} chains: {} signature slots, {} unique signatures\n",
            chains.len(),
            count.total,
            count.unique
        ),
    ))
}

pub fn verify_chains(ws: &Workspace, rpk: Option<&str>) -> CmdResult {
    let spec = ws.spec()?;
    let rpk = resolve_rpk(ws, &spec, rpk)?;
    let chains = ws.chains(&spec)?;
    let cfg = spec.chain_policy();
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all_ok = true;
    for (slot, (c, d)) in chains.iter().zip(&spec.documents).enumerate() {
        let signatures = verify_chain(c);
        let policy = chain_policy_eval(&cfg, &c.dinfo, &c.rinfos());
        let root = c.terminal_pk() == rpk;
        let ok = signatures && policy && root;
        all_ok &= ok;
        rows.push(json!({
            "slot": slot, "doctype": d.doctype, "ok": ok,
            "signatures": signatures, "chain_policy": policy, "root": root,
        }));
        text.push_str(&format!(
            "{slot} {:<6} {}\n",
            d.doctype,
            if ok { "ok".to_string() } else { format!("FAIL (signatures {signatures}, policy {policy}, root {root})") }
        ));
    }
    let dinfos: Vec<_> = chains.iter().map(|c| c.dinfo).collect();
    let phase = phase_policy_eval(&dinfos, &spec.phase_policy());
    all_ok &= phase;
    text.push_str(&format!("phase policy {}\n", if phase { "ok" } else { "FAIL" }));
    Ok(Outcome { ok: all_ok, report: json!({ "chains": rows, "phase_policy": phase }), text })
}

pub fn setup(ws: &Workspace, seed: Option<u64>) -> CmdResult {
    let spec = ws.spec()?;
    let params = RelationParams::from_spec(&spec);
    let (pk, vk) = setup_keys(&params, &mut rng_for(seed))?;
    write_file(&ws.proving_key_path(), &pk.to_bytes())?;
    write_file(&ws.verifying_key_path(), &vk.to_bytes())?;
    let cost = cost_breakdown(&params)?;
    Ok(Outcome::ok(
        json!({ "constraints": cost.total, "cost": cost, "spec_hash": params.spec_hash.to_hex() }),
        format!("keys written; {} constraints\n", cost.total),
    ))
}

pub fn prove(ws: &Workspace, rpk: Option<&str>, seed: Option<u64>, out: Option<&Path>) -> CmdResult {
    let spec = ws.spec()?;
    let rpk = resolve_rpk(ws, &spec, rpk)?;
    let pk = ProvingKey::from_bytes(&read(&ws.proving_key_path())?, &spec)?;
    let witness = Witness::new(ws.chains(&spec)?);
    let proof = prove_phase(&pk, &PublicInputs::new(rpk), &witness, &mut rng_for(seed))?;
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| ws.proof_path());
    let bytes = proof.to_bytes();
    write_file(&path, &bytes)?;
    Ok(Outcome::ok(
        json!({ "proof": path, "bytes": bytes.len(), "rpk": rpk.to_hex() }),
        format!("proof written to {} ({} bytes)\n", path.display(), bytes.len()),
    ))
}

pub fn verify(ws: &Workspace, rpk: Option<&str>, proof: Option<&Path>, vk: Option<&Path>) -> CmdResult {
    let vk_path = vk.map(Path::to_path_buf).unwrap_or_else(|| ws.verifying_key_path());
    let vk = VerificationKey::from_bytes(&read(&vk_path)?)?;
    let spec = ws.spec()?;
    let hash = spec.content_hash();
    if vk.spec_hash != hash {
        return Err(Error::SpecMismatch { expected: hash.to_hex(), found: vk.spec_hash.to_hex() }.into());
    }
    let rpk = resolve_rpk(ws, &spec, rpk)?;
    let proof_path = proof.map(Path::to_path_buf).unwrap_or_else(|| ws.proof_path());
    let ok = verify_proof_bytes(&vk, &PublicInputs::new(rpk), &read(&proof_path)?);
    Ok(Outcome {
        ok,
        report: json!({ "verified": ok, "rpk": rpk.to_hex() }),
        text: format!("{}\n", if ok { "proof verified" } else { "proof REJECTED" }),
    })
}

pub fn cost(ws: &Workspace) -> CmdResult {
    let spec = ws.spec()?;
    let params = RelationParams::from_spec(&spec);
    let c = cost_breakdown(&params)?;
    Ok(Outcome::ok(
        json!({ "cost": c, "total_signatures": params.total_signatures() }),
        format!(
            "signatures     {:>9} ({} x {})\nroot equality  {:>9}\nchain policy   {:>9}\nphase policy   {:>9}\nother          {:>9}\ntotal          {:>9}\n",
            c.signatures,
            params.total_signatures(),
            c.per_signature,
            c.root_equality,
            c.chain_policy,
            c.phase_policy,
            c.other,
            c.total
        ),
    ))
}

fn parse_grid(s: &str) -> Result<Vec<(usize, usize)>, Failure> {
    s.split(',')
        .map(|p| {
            let (l, n) = p
                .trim()
                .split_once('x')
                .ok_or_else(|| Failure::Usage(format!("grid point `{p}` is not LxN")))?;
            let num = |v: &str| {
                v.parse::<usize>()
                    .ok()
                    .filter(|&x| x > 0)
                    .ok_or_else(|| Failure::Usage(format!("grid point `{p}`: bad number `{v}`")))
            };
            Ok((num(l)?, num(n)?))
        })
        .collect()
}

pub fn bench(
    grid: &str,
    reps: usize,
    threads: Option<usize>,
    seed: u64,
    csv_out: Option<&Path>,
    format: &str,
    prove: bool,
) -> CmdResult {
    if reps == 0 {
        return Err(Failure::Usage("--reps must be at least 1".into()));
    }
    let cfg = BenchConfig { grid: parse_grid(grid)?, repetitions: reps, threads, seed, prove };
    let report = bench::run_scaling(&cfg)?;
    let csv = bench::to_csv(&report.rows);
    if let Some(path) = csv_out {
        write_file(path, csv.as_bytes())?;
    }
    let constraint_fit = bench::fit_against_signatures(&report.rows, |r| r.constraints as f64);
    let prove_fit = prove.then(|| bench::fit_against_signatures(&report.rows, |r| r.prove_ms)).flatten();
    let mut text = match format {
        "csv" => csv,
        "markdown" => bench::to_markdown(&report.rows),
        other => return Err(Failure::Usage(format!("unknown format `{other}`"))),
    };
    if let Some(f) = constraint_fit {
        text.push_str(&format!("constraints ~ total_sigs: slope {:.1}, R^2 {:.4}\n", f.slope, f.r_squared));
    }
    if let Some(f) = prove_fit {
        text.push_str(&format!("prove_ms ~ total_sigs: slope {:.1}, R^2 {:.4}\n", f.slope, f.r_squared));
    }
    Ok(Outcome::ok(
        json!({ "report": report, "constraint_fit": constraint_fit, "prove_fit": prove_fit }),
        text,
    ))
}

pub fn export_verifier(ws: &Workspace, out: Option<&Path>) -> CmdResult {
    let spec = ws.spec()?;
    let params = RelationParams::from_spec(&spec);
    let vk = VerificationKey::from_bytes(&read(&ws.verifying_key_path())?)?;
    if vk.spec_hash != params.spec_hash {
        return Err(Error::SpecMismatch { expected: params.spec_hash.to_hex(), found: vk.spec_hash.to_hex() }.into());
    }
    let path = out.map(Path::to_path_buf).unwrap_or_else(|| ws.root.join("verifier.json"));
    write_file(&path, VerifierExport::new(&params, &vk).to_json().as_bytes())?;
    Ok(Outcome::ok(json!({ "path": path }), format!("wrote {}\n", path.display())))
}

/// Removes the artifacts this tool manages, leaving anything else alone.
fn clear_workspace(ws: &Workspace) -> Result<(), Failure> {
    for dir in ["keys", "documents", "attestations", "chains", "circuit"] {
        let p = ws.root.join(dir);
        if p.is_dir() {
            fs::remove_dir_all(p)?;
        }
    }
    for file in [ws.spec_path(), ws.proof_path(), ws.root.join("verifier.json")] {
        if file.is_file() {
            fs::remove_file(file)?;
        }
    }
    Ok(())
}

pub fn demo_railway(ws: &Workspace, seed: u64) -> CmdResult {
    clear_workspace(ws)?;
    let mut log = String::new();
    let step = |o: Outcome, log: &mut String| -> Result<(), Failure> {
        log.push_str(&o.text);
        if o.ok {
            Ok(())
        } else {
            Err(Failure::Usage(format!("demo step failed: {}", o.text.trim())))
        }
    };
    step(init(ws, None)?, &mut log)?;
    let spec = ws.spec()?;
    for role in &spec.roles {
        step(keygen(ws, &role.id, Some(seed))?, &mut log)?;
    }
    for role in &spec.roles {
        step(attest_role(ws, &role.id, None, None)?, &mut log)?;
    }
    for (doctype, text) in document_payloads(&spec, seed) {
        write_file(&ws.document_path(&doctype), &text)?;
    }
    for slot in spec.reference_order()? {
        let doctype = spec.documents[slot].doctype.clone();
        step(attest_doc(ws, &doctype, &ws.document_path(&doctype), None)?, &mut log)?;
    }
    let built = build_chains(ws)?;
    let counts = built.report.clone();
    step(built, &mut log)?;
    step(verify_chains(ws, None)?, &mut log)?;
    step(setup(ws, Some(seed))?, &mut log)?;
    step(prove(ws, None, Some(seed), None)?, &mut log)?;
    let verified = verify(ws, None, None, None)?;
    let ok = verified.ok;
    log.push_str(&verified.text);
    Ok(Outcome {
        ok,
        report: json!({
            "workspace": ws.root,
            "seed": seed,
            "chains": counts["chains"],
            "total_signatures": counts["total_signatures"],
            "unique_signatures": counts["unique_signatures"],
            "verified": ok,
        }),
        text: log,
    })
}

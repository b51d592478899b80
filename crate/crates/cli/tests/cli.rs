use std::path::PathBuf;
use std::process::Command;

fn spec() -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/square3x3.sub")
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sofic").chain(args.iter().copied());
    let code = sofic_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("sofic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_bundled_spec() {
    let (code, out, _) = run(&["validate", &spec()]);
    assert_eq!(code, 0);
    assert!(out.contains("result=PASS"));
}

#[test]
fn count_without_spec_uses_flags() {
    let (code, out, _) = run(&[
        "count", "--r", "1", "--n", "9", "--m", "12", "--p", "5", "--q", "5", "--c", "4",
        "--second",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("N0=36 Np=2304 bound=4680 coarse=8100\n"));
    assert!(out.contains("N'0=3 N'q=9 N'p=57 N'c=276 bound=690 coarse=3420\n"));
}

#[test]
fn count_with_invalid_flags_is_a_usage_error() {
    let (code, _, err) = run(&["count", "--r", "3", "--n", "9", "--m", "12", "--p", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("invalid counting parameters"));
    let (code, _, _) = run(&["count"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["generate"]).0, 2);
    assert_eq!(run(&["generate", "/definitely/not/here.sub"]).0, 2);
    let broken = scratch(
        "broken.sub",
        "substitution x\nprototype sq facets 4 orient - + - +\nrule r parent sq\n  cell c1 sq\n",
    );
    let (code, _, err) = run(&["validate", &broken]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
    let (code, _, _) = run(&["generate", &spec(), "--stage", "6"]);
    assert_eq!(code, 2);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("hierarchy"));
}

#[test]
fn generate_is_deterministic() {
    let a = run(&["generate", &spec()]);
    let b = run(&["generate", &spec()]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1.lines().count(), 1544);
}

#[test]
fn seeded_assembly_reads_placements() {
    let seed = scratch(
        "seed.txt",
        "# T1 under parent 4\nplace 0 0 T1 base | k=1:(m,0,f3) k=2:(f3,4,f3) k=3:(m,0,p) k=4:(f1,4,f1)\n",
    );
    let (code, out, _) = run(&[
        "assemble",
        &spec(),
        "--width",
        "2",
        "--height",
        "2",
        "--seed",
        &seed,
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("place 0 0 T1 base"));
    let n: usize = out
        .lines()
        .find_map(|l| l.strip_prefix("patches="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(n > 0);
    assert_eq!(
        out.matches("\npatch ").count() + out.starts_with("patch ") as usize,
        n
    );
}

#[test]
fn render_writes_svg() {
    let out_path = std::env::temp_dir().join(format!("sofic-t1-{}.svg", std::process::id()));
    let out_path = out_path.to_string_lossy().into_owned();
    let tile = "T1 base | k=1:(m,0,m) k=2:(f3,1,f3) k=3:(m,0,m) k=4:(f1,1,f1)";
    let (code, _, _) = run(&["render", &spec(), "--svg", &out_path, "--tile", tile]);
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(&out_path).unwrap();
    for label in [">m 0 m<", ">3 1 3<", ">1 1 1<"] {
        assert!(svg.contains(label));
    }
    let (code, _, _) = run(&["render", &spec(), "--svg", &out_path]);
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(svg.matches("font-size=\"16\"").count(), 9);
}

#[test]
fn binary_reports_exit_status() {
    let bin = env!("CARGO_BIN_EXE_sofic");
    let ok = Command::new(bin).args(["count", &spec()]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("bound=4680"));
    let bad = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

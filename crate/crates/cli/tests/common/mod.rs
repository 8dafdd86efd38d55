//! Fixtures under `docs/examples` declare how to run them in header
//! comments: `% args: …` (shell-quoted, with `{file}` and `{dir}`
//! placeholders), `% exit: N`, and optionally `% fails: condition`.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub struct Fixture {
    pub path: PathBuf,
    pub args: Vec<String>,
    pub exit: i32,
    pub fails: Option<String>,
}

pub fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn header(text: &str, key: &str) -> Option<String> {
    let prefix = format!("% {key}:");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .map(|v| v.trim().to_string())
}

fn collect(dir: &Path, out: &mut Vec<PathBuf>) {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .expect("examples directory is readable")
        .map(|e| e.expect("directory entry").path())
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect(&path, out);
        } else {
            out.push(path);
        }
    }
}

pub fn load(path: &Path) -> Option<Fixture> {
    let text = std::fs::read_to_string(path).expect("fixture is readable");
    let line = header(&text, "args")?;
    let dir = path.parent().expect("fixture has a directory");
    let args = shlex::split(&line)
        .unwrap_or_else(|| panic!("{}: unbalanced quotes in args", path.display()))
        .into_iter()
        .map(|a| {
            a.replace("{file}", &path.display().to_string())
                .replace("{dir}", &dir.display().to_string())
        })
        .collect();
    let exit = header(&text, "exit")
        .unwrap_or_else(|| panic!("{}: missing exit header", path.display()))
        .parse()
        .expect("exit code is an integer");
    Some(Fixture {
        path: path.to_path_buf(),
        args,
        exit,
        fails: header(&text, "fails"),
    })
}

/// Every file under `docs/examples` that declares `% args:`.
pub fn fixtures() -> Vec<Fixture> {
    let mut paths = Vec::new();
    collect(&examples_dir(), &mut paths);
    paths.iter().filter_map(|p| load(p)).collect()
}

/// `ctis` followed by `args`.
pub fn argv<S: AsRef<str>>(args: &[S]) -> Vec<String> {
    std::iter::once("ctis".to_string())
        .chain(args.iter().map(|a| a.as_ref().to_string()))
        .collect()
}

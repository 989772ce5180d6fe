#!/usr/bin/env python3
"""Fetch the real summary datasets used by the golden tests.

The genetic association data analyzed here (circulating vitamin D levels on
multiple sclerosis; blood lipids on CHD / AMD / Alzheimer's) are packaged in
the public MR_outliers repository:

    https://github.com/mmax-code/MR_outliers

This script downloads that repository (or reads a local clone via
``--from-dir``), locates the summary-statistics files and converts them into
the tab-separated layout the toolkit loads:

    snp  beta_x_1..beta_x_d  se_x_1..se_x_d  beta_y  se_y

Outputs (written to --out, default ./data):
    vitamin_d.tsv    univariable, d = 1, 22 variants
    lipids_chd.tsv   multivariable, d = 3 (LDL, HDL, triglycerides), 185 variants
    lipids_amd.tsv   same exposures, AMD outcome
    lipids_alz.tsv   same exposures, Alzheimer's outcome

Needs network access (unless --from-dir) plus pandas; .rda/.rds inputs also
need pyreadr (pip install pyreadr). If the repository layout changed, run with
--list to see the candidate files and pass them explicitly via --uni-file /
--multi-file.
"""

import argparse
import io
import re
import sys
import tarfile
import tempfile
import urllib.request
from pathlib import Path

ARCHIVE_URLS = [
    "https://codeload.github.com/mmax-code/MR_outliers/tar.gz/refs/heads/main",
    "https://codeload.github.com/mmax-code/MR_outliers/tar.gz/refs/heads/master",
]

SNP_COLS = ["snp", "rsid", "rs_id", "id", "variant"]
DATA_SUFFIXES = {".csv", ".tsv", ".txt", ".rda", ".rdata", ".rds"}


def download_archive(workdir: Path) -> Path:
    last_err = None
    for url in ARCHIVE_URLS:
        try:
            print(f"downloading {url} ...")
            with urllib.request.urlopen(url, timeout=60) as resp:
                blob = resp.read()
            with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tar:
                tar.extractall(workdir)
            roots = [p for p in workdir.iterdir() if p.is_dir()]
            if roots:
                return roots[0]
        except Exception as err:  # noqa: BLE001 - report and try the next URL
            last_err = err
            print(f"  failed: {err}")
    raise SystemExit(f"could not download the repository archive ({last_err}); "
                     f"clone it manually and re-run with --from-dir")


def candidate_files(root: Path):
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.suffix.lower() in DATA_SUFFIXES:
            yield path


def load_table(path: Path):
    import pandas as pd

    suffix = path.suffix.lower()
    if suffix in {".rda", ".rdata", ".rds"}:
        try:
            import pyreadr
        except ImportError:
            raise SystemExit(f"{path} is an R data file; pip install pyreadr to convert it")
        result = pyreadr.read_r(str(path))
        if not result:
            return None
        return next(iter(result.values()))
    for sep in ["\t", ",", r"\s+"]:
        try:
            df = pd.read_csv(path, sep=sep, engine="python")
        except Exception:  # noqa: BLE001
            continue
        if df.shape[1] >= 3:
            return df
    return None


def find_column(df, *patterns):
    for pattern in patterns:
        rx = re.compile(pattern, re.IGNORECASE)
        for col in df.columns:
            if rx.fullmatch(str(col).strip()):
                return col
    return None


def pick_snp_column(df):
    col = find_column(df, *(re.escape(c) for c in SNP_COLS))
    if col is not None:
        return col
    # fall back: first column whose values mostly look like rs ids
    for c in df.columns:
        values = df[c].astype(str)
        if (values.str.match(r"rs\d+").mean()) > 0.8:
            return c
    return None


def write_tsv(out_path: Path, snp, betas_x, ses_x, beta_y, se_y):
    d = len(betas_x)
    header = (["snp"] + [f"beta_x_{j + 1}" for j in range(d)] +
              [f"se_x_{j + 1}" for j in range(d)] + ["beta_y", "se_y"])
    with out_path.open("w", newline="\n") as out:
        out.write("\t".join(header) + "\n")
        for i in range(len(snp)):
            row = [str(snp[i])]
            row += [repr(float(b[i])) for b in betas_x]
            row += [repr(float(s[i])) for s in ses_x]
            row += [repr(float(beta_y[i])), repr(float(se_y[i]))]
            out.write("\t".join(row) + "\n")
    print(f"wrote {out_path} ({len(snp)} variants, d={d})")


def convert_univariable(df, out_path: Path) -> bool:
    snp_col = pick_snp_column(df)
    bx = find_column(df, r"beta[._]?(exposure|x)", r"bx")
    sx = find_column(df, r"se[._]?(exposure|x)", r"se[._]?bx")
    by = find_column(df, r"beta[._]?(outcome|y)", r"by")
    sy = find_column(df, r"se[._]?(outcome|y)", r"se[._]?by")
    if not all([snp_col, bx, sx, by, sy]):
        return False
    clean = df[[snp_col, bx, sx, by, sy]].dropna()
    write_tsv(out_path, clean[snp_col].tolist(), [clean[bx].tolist()], [clean[sx].tolist()],
              clean[by].tolist(), clean[sy].tolist())
    return True


def convert_multivariable(df, out_path: Path, outcome: str) -> bool:
    snp_col = pick_snp_column(df)
    exposures = []
    for name in ["ldl", "hdl", "tg|tri(g|glyceride)?s?"]:
        b = find_column(df, rf"({name})[._]?beta", rf"beta[._]?({name})")
        s = find_column(df, rf"({name})[._]?se", rf"se[._]?({name})")
        if b is None or s is None:
            return False
        exposures.append((b, s))
    by = find_column(df, rf"({outcome})[._]?beta", rf"beta[._]?({outcome})")
    sy = find_column(df, rf"({outcome})[._]?se", rf"se[._]?({outcome})")
    if not all([snp_col, by, sy]):
        return False
    cols = [snp_col] + [c for pair in exposures for c in pair] + [by, sy]
    clean = df[cols].dropna()
    write_tsv(out_path, clean[snp_col].tolist(),
              [clean[b].tolist() for b, _ in exposures],
              [clean[s].tolist() for _, s in exposures],
              clean[by].tolist(), clean[sy].tolist())
    return True


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", type=Path, default=Path("data"), help="output directory (default: data)")
    parser.add_argument("--from-dir", type=Path, help="use a local clone instead of downloading")
    parser.add_argument("--list", action="store_true", help="only list candidate data files")
    parser.add_argument("--uni-file", type=Path, help="explicit path to the vitamin D summary table")
    parser.add_argument("--multi-file", type=Path, help="explicit path to the lipid summary table")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        root = args.from_dir if args.from_dir else download_archive(Path(tmp))
        files = list(candidate_files(root))
        if args.list:
            for f in files:
                print(f.relative_to(root))
            return 0

        args.out.mkdir(parents=True, exist_ok=True)
        done_uni = False
        done_multi = {"chd": False, "amd": False, "alz": False}

        uni_candidates = ([args.uni_file] if args.uni_file else
                          [f for f in files if re.search(r"vit|ms|sclerosis|uni", f.name, re.IGNORECASE)])
        for f in uni_candidates:
            df = load_table(f)
            if df is not None and convert_univariable(df, args.out / "vitamin_d.tsv"):
                done_uni = True
                break

        multi_candidates = ([args.multi_file] if args.multi_file else
                            [f for f in files if re.search(r"lipid|multi|chd|amd|alz", f.name, re.IGNORECASE)])
        for f in multi_candidates:
            df = load_table(f)
            if df is None:
                continue
            for outcome, alias in [("chd", "chd|cad|heart"), ("amd", "amd|macular"), ("alz", "alz")]:
                if not done_multi[outcome] and convert_multivariable(df, args.out / f"lipids_{outcome}.tsv", alias):
                    done_multi[outcome] = True

        if not done_uni:
            print("WARNING: vitamin D table not recognized automatically; "
                  "run with --list and pass --uni-file <path>", file=sys.stderr)
        for outcome, ok in done_multi.items():
            if not ok:
                print(f"WARNING: lipid/{outcome} table not recognized automatically; "
                      f"run with --list and pass --multi-file <path>", file=sys.stderr)
        return 0 if done_uni else 1


if __name__ == "__main__":
    sys.exit(main())

"""``qhyp`` command line.

Matrices and other structured inputs are given either inline as JSON or as
a path to a JSON file.  Results go to stdout as JSON; domain errors go to
stderr as JSON with exit status 1; malformed input exits with status 2.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import collars, hspace, jorgensen, spectrum, spgroup
from .errors import QHypError


def _load_json(text: str):
    text = text.strip()
    if text[:1] in "{[" or text[:1].isdigit() or text[:1] == "-":
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _matrix(text: str) -> spgroup.SpMatrix:
    data = _load_json(text)
    if isinstance(data, dict):
        return spgroup.SpMatrix.from_json(data)
    return spgroup.validate(data)


def _emit(obj) -> None:
    # json uses repr for floats: shortest string that round-trips exactly
    click.echo(json.dumps(obj, allow_nan=True))


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except QHypError as exc:
            click.echo(json.dumps(exc.to_dict()), err=True)
            ctx.exit(1)
        except (ValueError, KeyError, TypeError, IndexError, OSError) as exc:
            click.echo(json.dumps({"error": "MalformedInput", "message": str(exc)}), err=True)
            ctx.exit(2)


@click.group(cls=_Group)
def cli():
    """Quaternionic hyperbolic geometry: discreteness tests and collars."""


@cli.command()
@click.option("--matrix", "matrix", required=True, help="Sp(n,1) matrix (JSON or file).")
def classify(matrix):
    """Elliptic, parabolic or loxodromic."""
    g = _matrix(matrix)
    _emit({"class": spgroup.classify(g).value})


@cli.command()
@click.option("--matrix", "matrix", required=True)
def mg(matrix):
    """M_g, delta(g), rotation data and fixed points of a loxodromic element."""
    _emit(spgroup.loxodromic_data(_matrix(matrix)).to_json())


@cli.command("jorgensen")
@click.option("--g", "g", required=True)
@click.option("--h", "h", required=True)
@click.option("--condition", default="all", show_default=True,
              help="thm11, a, b, c, d or all.")
def jorgensen_cmd(g, h, condition):
    """Evaluate the Jorgensen-type inequalities for the pair (g, h)."""
    g, h = _matrix(g), _matrix(h)
    names = list(jorgensen.Condition) if condition == "all" else [jorgensen.Condition.parse(condition)]
    reports = [jorgensen.test_corollary12(g, h, c).to_json() for c in names]
    _emit(reports[0] if len(reports) == 1 else {"reports": reports})


@cli.command()
@click.option("--g", "g", required=True)
@click.option("--h", "h", required=True)
@click.option("--kmax", default=20, show_default=True, type=click.IntRange(1))
@click.option("--auto-conjugate/--no-auto-conjugate", default=True, show_default=True,
              help="Move the axis of g to (o, inf) first.")
def iterate(g, h, kmax, auto_conjugate):
    """Run h_{k+1} = h_k g h_k^-1 and report the verdict."""
    g, h = _matrix(g), _matrix(h)
    conj = None
    if auto_conjugate and not jorgensen.in_diagonal_position(g):
        conj = "auto"
    _emit(jorgensen.iterate(g, h, kmax, conjugator=conj).to_json())


@cli.command()
@click.option("--matrix", "matrix", default=None)
@click.option("--mg", "mg_value", type=float, default=None, help="Use this M_g directly.")
def collar(matrix, mg_value):
    """Canonical tube radius about the axis of a loxodromic element."""
    if (matrix is None) == (mg_value is None):
        raise click.UsageError("give exactly one of --matrix and --mg")
    res = collars.collar_from_mg(mg_value) if matrix is None else collars.canonical_collar(_matrix(matrix))
    _emit(res.to_json())


@cli.command()
@click.option("--g", "g", required=True)
@click.option("--h", "h", required=True)
def disjoint(g, h):
    """Disjointness chain for the canonical tubes about two axes."""
    _emit(collars.disjointness_check(_matrix(g), _matrix(h)).to_json())


@cli.command("tube-check")
@click.option("--g", "g", required=True, help="Loxodromic generator whose tube is tested.")
@click.option("--h", "hs", multiple=True, help="Further generators (repeatable).")
@click.option("--word-length", default=3, show_default=True, type=click.IntRange(1, 8))
def tube_check(g, hs, word_length):
    """Check precise invariance of the canonical tube over short words."""
    gens = [_matrix(g)] + [_matrix(x) for x in hs]
    _emit(collars.tube_invariance_harness(gens, 0, word_length).to_json())


@cli.command("spectrum")
@click.option("--profile", default=None, help='{"angles": [...], "beta_n": b, "l": l}')
@click.option("--matrix", "matrix", default=None, help="Take the profile from a loxodromic element.")
@click.option("--kmax", default=spectrum.DEFAULT_KMAX, show_default=True, type=click.IntRange(1))
@click.option("--csv", "csv_path", default=None, type=click.Path(dir_okay=False))
def spectrum_cmd(profile, matrix, kmax, csv_path):
    """Minimise M_{g^k} over 1 <= k <= kmax."""
    if (profile is None) == (matrix is None):
        raise click.UsageError("give exactly one of --profile and --matrix")
    if profile is not None:
        prof = spectrum.AngleProfile.from_json(_load_json(profile))
    else:
        prof = spectrum.AngleProfile.from_loxodromic(spgroup.loxodromic_data(_matrix(matrix)))
    res = spectrum.minimize_T(prof, kmax)
    if csv_path:
        spectrum.write_spectrum_csv(csv_path, res)
    _emit(res.to_json())


@cli.command()
@click.option("--angles", required=True, help="JSON list of n angles.")
@click.option("--N", "N", required=True, type=click.IntRange(2))
def pigeonhole(angles, N):
    """Smallest k <= N^n aligning every angle within 2 pi / N."""
    k = spectrum.pigeonhole_k(_load_json(angles), N)
    _emit({"k": k, "N": N})


@cli.command()
@click.option("--l", "l", required=True, type=float)
@click.option("--N", "N", required=True, type=click.IntRange(2))
@click.option("--n", "n", required=True, type=click.IntRange(1))
@click.option("--collar/--no-collar", "with_collar", default=False,
              help="Also report the length-only collar radius.")
def rn(l, N, n, with_collar):
    """R_N(l), the angle-free bound on min_k M_{g^k}."""
    out = {"R_N": spectrum.r_n_bound(l, N, n), "limit": collars.MG_LIMIT}
    if with_collar:
        out["collar"] = spectrum.length_only_collar(l, n, N).to_json()
    _emit(out)


@cli.command()
@click.option("--n", "n", default=2, show_default=True, type=click.IntRange(1))
@click.option("--xmin", default=spectrum.X0, show_default=True, type=float)
@click.option("--xmax", default=120.0, show_default=True, type=float)
@click.option("--step", default=0.25, show_default=True, type=float)
@click.option("--csv", "csv_path", default=None, type=click.Path(dir_okay=False))
def lcurve(n, xmin, xmax, step, csv_path):
    """Tabulate l(x), the largest length allowed by R_x < sqrt(3) - 1."""
    rows = spectrum.curve_samples(n, xmin, xmax, step)
    if csv_path:
        spectrum.write_curve_csv(csv_path, rows)
    x_best, l_best = max(rows, key=lambda r: r[1])
    _emit({"x0": spectrum.X0, "count": len(rows), "argmax_x": x_best, "max_l": l_best,
           **({} if csv_path else {"samples": rows})})


@cli.command()
@click.option("--gamma1", default=None, help='Geodesic {"p": lift, "q": lift}; default (o, inf).')
@click.option("--gamma2", default=None, help="Second geodesic.")
@click.option("--h", "h", default=None, help="Use h(gamma1) as the second geodesic.")
@click.option("--oracle/--no-oracle", default=True, show_default=True)
def distance(gamma1, gamma2, h, oracle):
    """Cross-ratio lower bound (and numerical value) of the distance between geodesics."""
    if (gamma2 is None) == (h is None):
        raise click.UsageError("give exactly one of --gamma2 and --h")
    if gamma1 is None:
        n = _matrix(h).n if h else len(_load_json(gamma2)["p"]) - 1
        g1 = collars.geodesic_from_endpoints(hspace.origin(n), hspace.infinity(n))
    else:
        g1 = collars.Geodesic.from_json(_load_json(gamma1))
    g2 = g1.image(_matrix(h)) if h else collars.Geodesic.from_json(_load_json(gamma2))
    bound = collars.geodesic_distance_lower_bound(g1, g2)
    out = {"bound": bound, "cosh_bound": math.cosh(bound)}
    if oracle:
        c, t, s = collars.geodesic_distance_oracle(g1, g2)
        out.update(oracle_cosh=c, oracle_distance=collars.safe_acosh(c), t=t, s=s)
    _emit(out)


# output is always JSON; --json is accepted anywhere for scripts that pass it
for _cmd in (cli, *cli.commands.values()):
    _cmd.params.append(click.Option(["--json"], is_flag=True, expose_value=False,
                                    help="Output JSON (always on)."))


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="qhyp", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    # a caught domain error comes back as the exit code
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""Exhaustive oracle for the chronological (truth) unit-commitment model.

Independent of the C++ implementation: reads an instance bundle, enumerates
every feasible binary commitment pattern directly from the constraint
definitions, solves the remaining dispatch LP per pattern (scipy linprog /
HiGHS), and reports the best objective.

Model semantics (one block over the whole horizon, steps t = 1..T):
  * balance with PNS/EPS slacks at every step;
  * p <= PC*u and p >= min_output*u;
  * u_t - u_{t-1} = su_t - sd_t for t >= 2 (the first step has no history,
    so su_1 = sd_1 = 0 and the initial state is free);
  * sum of su over the trailing min-up window <= u_t, emitted only for
    t >= MU (windows that would reach before the horizon are skipped);
    min-down mirrored;
  * ramp rows for t >= 2;
  * storage level recursion with the first step anchored at the initial
    level fraction.

Generators with relaxed_uc stay continuous and are left inside the LP.

Usage: brute_force_uc.py MANIFEST [--max-patterns N]
Prints a JSON object: objective, startups, shutdowns, patterns, lp_solves.
"""

import argparse
import csv
import itertools
import json
import os
import sys

import numpy as np
from scipy.optimize import linprog


def load_instance(manifest_path):
    with open(manifest_path) as f:
        manifest = json.load(f)
    demand_file = manifest["demand"].get("file", "demand.csv")
    demand_path = os.path.join(os.path.dirname(manifest_path), demand_file)
    demand = []
    with open(demand_path) as f:
        reader = csv.DictReader(f)
        for row in reader:
            demand.append(float(row["demand_mw"]))
    return manifest, demand


def commitment_patterns(T, min_up, min_down, limit):
    """All u-vectors respecting the window rules above."""
    out = []

    def extend(prefix, value, run_min):
        remaining = T - len(prefix)
        for run_len in range(1, remaining + 1):
            ends_at_horizon = len(prefix) + run_len == T
            if run_len < run_min and not ends_at_horizon:
                continue
            new = prefix + [value] * run_len
            if ends_at_horizon:
                out.append(new)
                if len(out) > limit:
                    raise RuntimeError("pattern limit exceeded")
            else:
                extend(new, 1 - value, min_up if value == 0 else min_down)

    # initial run: free length, both starting states
    extend([], 0, 1)
    extend([], 1, 1)
    return out


class LpModel:
    """Fixed LP skeleton; only the p-bounds of enumerated generators move."""

    def __init__(self, manifest, demand):
        self.T = len(demand)
        self.demand = demand
        gens = manifest.get("generators", [])
        self.fixed_gens = [g for g in gens if not g.get("relaxed_uc", False)]
        self.relaxed_gens = [g for g in gens if g.get("relaxed_uc", False)]
        self.storages = manifest.get("storages", [])
        self.pns_penalty = manifest["demand"]["pns_penalty"]
        self.eps_penalty = manifest["demand"]["eps_penalty"]

        T = self.T
        self.cols = {}
        n = 0
        for i, _ in enumerate(self.fixed_gens):
            self.cols[("p", "f", i)] = n
            n += T
        for i, _ in enumerate(self.relaxed_gens):
            for role in ("p", "u", "su", "sd"):
                self.cols[(role, "r", i)] = n
                n += T
        for i, _ in enumerate(self.storages):
            for role in ("l", "c", "gdis"):
                self.cols[(role, "s", i)] = n
                n += T
        self.cols[("pns",)] = n
        n += T
        self.cols[("eps",)] = n
        n += T
        self.ncols = n

        self.c = np.zeros(n)
        for i, g in enumerate(self.fixed_gens):
            self.c[self.col("p", "f", i) : self.col("p", "f", i) + T] = g["var_cost"]
        for i, g in enumerate(self.relaxed_gens):
            self.c[self.col("p", "r", i) : self.col("p", "r", i) + T] = g["var_cost"]
            self.c[self.col("u", "r", i) : self.col("u", "r", i) + T] = g.get("commit_cost", 0.0)
            self.c[self.col("su", "r", i) : self.col("su", "r", i) + T] = g.get("startup_cost", 0.0)
            self.c[self.col("sd", "r", i) : self.col("sd", "r", i) + T] = g.get("shutdown_cost", 0.0)
        self.c[self.col("pns") : self.col("pns") + T] = self.pns_penalty
        self.c[self.col("eps") : self.col("eps") + T] = self.eps_penalty

        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []

        def row():
            return np.zeros(self.ncols)

        for t in range(T):  # balance
            r = row()
            for i, _ in enumerate(self.fixed_gens):
                r[self.col("p", "f", i) + t] = 1.0
            for i, _ in enumerate(self.relaxed_gens):
                r[self.col("p", "r", i) + t] = 1.0
            for i, _ in enumerate(self.storages):
                r[self.col("gdis", "s", i) + t] = 1.0
                r[self.col("c", "s", i) + t] = -1.0
            r[self.col("pns") + t] = 1.0
            r[self.col("eps") + t] = -1.0
            eq_rows.append(r)
            eq_rhs.append(demand[t])

        def add_ramps(col0, g):
            for t in range(1, T):
                r = row()
                r[col0 + t] = 1.0
                r[col0 + t - 1] = -1.0
                ub_rows.append(r)
                ub_rhs.append(g["ramp_up"])
                r = row()
                r[col0 + t - 1] = 1.0
                r[col0 + t] = -1.0
                ub_rows.append(r)
                ub_rhs.append(g["ramp_down"])

        for i, g in enumerate(self.fixed_gens):
            add_ramps(self.col("p", "f", i), g)
        for i, g in enumerate(self.relaxed_gens):
            p0, u0 = self.col("p", "r", i), self.col("u", "r", i)
            su0, sd0 = self.col("su", "r", i), self.col("sd", "r", i)
            add_ramps(p0, g)
            for t in range(T):  # capacity
                r = row()
                r[p0 + t] = 1.0
                r[u0 + t] = -g["capacity"]
                ub_rows.append(r)
                ub_rhs.append(0.0)
                if g.get("min_output", 0.0) > 0.0:
                    r = row()
                    r[p0 + t] = -1.0
                    r[u0 + t] = g["min_output"]
                    ub_rows.append(r)
                    ub_rhs.append(0.0)
            for t in range(1, T):  # commitment balance
                r = row()
                r[u0 + t] = 1.0
                r[u0 + t - 1] = -1.0
                r[su0 + t] = -1.0
                r[sd0 + t] = 1.0
                eq_rows.append(r)
                eq_rhs.append(0.0)
            mu, md = g["min_up"], g["min_down"]
            for t in range(mu - 1, T):  # min up
                r = row()
                for tp in range(t - mu + 1, t + 1):
                    r[su0 + tp] = 1.0
                r[u0 + t] = -1.0
                ub_rows.append(r)
                ub_rhs.append(0.0)
            for t in range(md - 1, T):  # min down
                r = row()
                for tp in range(t - md + 1, t + 1):
                    r[sd0 + tp] = 1.0
                r[u0 + t] = 1.0
                ub_rows.append(r)
                ub_rhs.append(1.0)

        for i, s in enumerate(self.storages):
            l0, c0, g0 = self.col("l", "s", i), self.col("c", "s", i), self.col("gdis", "s", i)
            eta_c = s.get("charge_efficiency", 1.0)
            eta_d = s.get("discharge_efficiency", 1.0)
            for t in range(T):
                r = row()
                r[l0 + t] = 1.0
                if t >= 1:
                    r[l0 + t - 1] = -1.0
                r[c0 + t] = -eta_c
                r[g0 + t] = 1.0 / eta_d
                eq_rows.append(r)
                eq_rhs.append(
                    0.0 if t >= 1
                    else s.get("initial_level_fraction", 0.0) * s["energy_capacity"])

        self.A_ub = np.array(ub_rows) if ub_rows else None
        self.b_ub = np.array(ub_rhs) if ub_rhs else None
        self.A_eq = np.array(eq_rows)
        self.b_eq = np.array(eq_rhs)

        self.base_bounds = [(0.0, None)] * self.ncols
        for i, g in enumerate(self.relaxed_gens):
            for t in range(T):
                self.base_bounds[self.col("p", "r", i) + t] = (0.0, g["capacity"])
                for role in ("u", "su", "sd"):
                    self.base_bounds[self.col(role, "r", i) + t] = (0.0, 1.0)
        for i, s in enumerate(self.storages):
            for t in range(T):
                self.base_bounds[self.col("l", "s", i) + t] = (0.0, s["energy_capacity"])
                self.base_bounds[self.col("c", "s", i) + t] = (0.0, s["max_charge"])
                self.base_bounds[self.col("gdis", "s", i) + t] = (0.0, s["max_discharge"])

    def col(self, *key):
        return self.cols[key]

    def dispatch_cost(self, patterns):
        bounds = list(self.base_bounds)
        for i, (g, u) in enumerate(zip(self.fixed_gens, patterns)):
            mo = g.get("min_output", 0.0)
            for t in range(self.T):
                bounds[self.col("p", "f", i) + t] = (mo * u[t], g["capacity"] * u[t])
        res = linprog(self.c, A_ub=self.A_ub, b_ub=self.b_ub, A_eq=self.A_eq, b_eq=self.b_eq,
                      bounds=bounds, method="highs")
        if res.status != 0:
            return None, None
        return res.fun, res.x

    def dispatch_lower_bound(self):
        """Dispatch LP with every enumerated generator fully available and no
        floor: a relaxation of every pattern's LP, hence a valid bound."""
        bounds = list(self.base_bounds)
        for i, g in enumerate(self.fixed_gens):
            for t in range(self.T):
                bounds[self.col("p", "f", i) + t] = (0.0, g["capacity"])
        res = linprog(self.c, A_ub=self.A_ub, b_ub=self.b_ub, A_eq=self.A_eq, b_eq=self.b_eq,
                      bounds=bounds, method="highs")
        return res.fun if res.status == 0 else 0.0


def pattern_events(u):
    su = [0.0] * len(u)
    sd = [0.0] * len(u)
    for t in range(1, len(u)):
        d = u[t] - u[t - 1]
        if d > 0:
            su[t] = d
        else:
            sd[t] = -d
    return su, sd


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("manifest")
    parser.add_argument("--max-patterns", type=int, default=2_000_000)
    args = parser.parse_args()

    manifest, demand = load_instance(args.manifest)
    model = LpModel(manifest, demand)
    T = model.T

    per_gen = []
    for g in model.fixed_gens:
        per_gen.append(commitment_patterns(T, g["min_up"], g["min_down"], args.max_patterns))
    total = 1
    for p in per_gen:
        total *= len(p)
    if total > args.max_patterns:
        raise RuntimeError("joint pattern count %d exceeds limit" % total)

    best = None
    best_info = None
    lp_solves = 0
    lp_lb = model.dispatch_lower_bound()
    for combo in itertools.product(*per_gen) if per_gen else [()]:
        fixed_cost = 0.0
        events = []
        for g, u in zip(model.fixed_gens, combo):
            su, sd = pattern_events(u)
            events.append((su, sd))
            fixed_cost += g.get("commit_cost", 0.0) * sum(u)
            fixed_cost += g.get("startup_cost", 0.0) * sum(su)
            fixed_cost += g.get("shutdown_cost", 0.0) * sum(sd)
        if best is not None and fixed_cost + lp_lb >= best - 1e-12:
            continue
        lp_cost, x = model.dispatch_cost(combo)
        lp_solves += 1
        if lp_cost is None:
            continue
        cost = fixed_cost + lp_cost
        if best is None or cost < best - 1e-12:
            startups = sum(sum(su) for su, _ in events)
            shutdowns = sum(sum(sd) for _, sd in events)
            for i, _ in enumerate(model.relaxed_gens):
                su0 = model.col("su", "r", i)
                sd0 = model.col("sd", "r", i)
                startups += float(np.sum(x[su0 : su0 + T]))
                shutdowns += float(np.sum(x[sd0 : sd0 + T]))
            best = cost
            best_info = {"startups": startups, "shutdowns": shutdowns}

    print(json.dumps({
        "objective": best,
        "startups": best_info["startups"] if best_info else None,
        "shutdowns": best_info["shutdowns"] if best_info else None,
        "patterns": total,
        "lp_solves": lp_solves,
    }))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Finite interpretations: evaluation, satisfaction, isomorphism.

Elements are 0..n-1.  Function tables are nested tuples indexed by argument
(unary: tuple of ints, binary: tuple of row tuples); relation tables hold
bools.  Models are immutable after construction.
"""

from __future__ import annotations

from itertools import permutations, product

from .terms import VAR, formula_vars


class ModelError(ValueError):
    pass


class FiniteModel:
    """Carrier {0..n-1} with total operation and relation tables.

    constants, fun_tables and rel_tables are name-keyed dicts; key insertion
    order is the declaration order and fixes the table encoding used for
    canonical forms.
    """

    def __init__(self, size, constants=None, fun_tables=None, rel_tables=None):
        if size < 1:
            raise ModelError("model size must be >= 1")
        self.size = size
        self.constants = dict(constants or {})
        self.fun_tables = {k: _freeze(v) for k, v in (fun_tables or {}).items()}
        self.rel_tables = {k: _freeze(v) for k, v in (rel_tables or {}).items()}
        self._check()

    def _check(self):
        for name, v in self.constants.items():
            if not 0 <= v < self.size:
                raise ModelError("constant %s out of range" % name)
        for name, t in self.fun_tables.items():
            for v in _flat(t):
                if not 0 <= v < self.size:
                    raise ModelError("table %s entry out of range" % name)

    def constant_names(self):
        return list(self.constants)

    def function_names(self):
        return list(self.fun_tables)

    def relation_names(self):
        return list(self.rel_tables)

    def signature(self):
        return (tuple(self.constants),
                tuple((k, _arity(t)) for k, t in self.fun_tables.items()),
                tuple((k, _arity(t)) for k, t in self.rel_tables.items()))

    # ---- evaluation

    def eval_term(self, env, t):
        if t[0] == VAR:
            return env[t[1]]
        name = t[0]
        args = tuple(self.eval_term(env, a) for a in t[1:])
        if not args:
            if name in self.constants:
                return self.constants[name]
            if name.isdigit() and int(name) < self.size and name not in self.fun_tables:
                # numerals name elements directly when not interpreted
                return int(name)
            raise ModelError("uninterpreted constant %r" % name)
        table = self.fun_tables.get(name)
        if table is None:
            raise ModelError("uninterpreted function %r" % name)
        for a in args:
            table = table[a]
        return table

    def eval_atom(self, env, atom):
        if atom[0] == "=":
            return self.eval_term(env, atom[1]) == self.eval_term(env, atom[2])
        table = self.rel_tables.get(atom[0])
        if table is None:
            raise ModelError("uninterpreted relation %r" % atom[0])
        for t in atom[1:]:
            table = table[self.eval_term(env, t)]
        return bool(table)

    def holds(self, env, f):
        tag = f[0]
        if tag == "atom":
            return self.eval_atom(env, f[1])
        if tag == "not":
            return not self.holds(env, f[1])
        a = self.holds(env, f[1])
        if tag == "and":
            return a and self.holds(env, f[2])
        if tag == "or":
            return a or self.holds(env, f[2])
        if tag == "imp":
            return (not a) or self.holds(env, f[2])
        if tag == "iff":
            return a == self.holds(env, f[2])
        raise ValueError("unknown formula tag %r" % tag)

    def environments(self, f):
        names = sorted(formula_vars(f))
        for values in product(range(self.size), repeat=len(names)):
            yield dict(zip(names, values))

    def satisfies(self, f):
        return all(self.holds(env, f) for env in self.environments(f))

    def counterexample_env(self, f):
        for env in self.environments(f):
            if not self.holds(env, f):
                return env
        return None

    # ---- isomorphism

    def encode(self):
        """Flat tuple encoding: constants (declaration order), then function
        tables in declaration order row-major, then relation tables."""
        out = list(self.constants.values())
        for t in self.fun_tables.values():
            out.extend(_flat(t))
        for t in self.rel_tables.values():
            out.extend(int(v) for v in _flat(t))
        return tuple(out)

    def permuted(self, perm):
        """Image of the model under relabeling i -> perm[i]."""
        inv = [0] * self.size
        for i, p in enumerate(perm):
            inv[p] = i
        consts = {k: perm[v] for k, v in self.constants.items()}
        funs = {}
        for k, t in self.fun_tables.items():
            funs[k] = _map_table(t, inv, perm, _arity(t), self.size)
        rels = {}
        for k, t in self.rel_tables.items():
            rels[k] = _map_table(t, inv, None, _arity(t), self.size)
        return FiniteModel(self.size, consts, funs, rels)

    def canonical_form(self):
        """Least table encoding over all carrier relabelings."""
        n = self.size
        const_vals = list(self.constants.values())
        funs = [(list(_flat(t)), _arity(t))
                for t in self.fun_tables.values()]
        rels = [(list(_flat(t)), _arity(t))
                for t in self.rel_tables.values()]
        best = None
        best_perm = None
        for perm in permutations(range(n)):
            inv = [0] * n
            for i, p in enumerate(perm):
                inv[p] = i
            enc = [perm[v] for v in const_vals]
            # product(inv, repeat=a) walks new index tuples row-major,
            # already mapped through the inverse relabeling
            for flat, a in funs:
                for idx in product(inv, repeat=a):
                    j = 0
                    for i in idx:
                        j = j * n + i
                    enc.append(perm[flat[j]])
            for flat, a in rels:
                for idx in product(inv, repeat=a):
                    j = 0
                    for i in idx:
                        j = j * n + i
                    enc.append(int(flat[j]))
            enc = tuple(enc)
            if best is None or enc < best:
                best, best_perm = enc, perm
        return self.permuted(best_perm)

    def __eq__(self, other):
        return (isinstance(other, FiniteModel) and self.size == other.size
                and self.signature() == other.signature()
                and self.encode() == other.encode())

    def __hash__(self):
        return hash((self.size, self.signature(), self.encode()))

    def __repr__(self):
        return "FiniteModel(%s)" % serialize_model(self)


def _freeze(t):
    if isinstance(t, (list, tuple)):
        return tuple(_freeze(x) for x in t)
    return t


def _flat(t):
    if isinstance(t, tuple):
        for x in t:
            yield from _flat(x)
    else:
        yield t


def _arity(t):
    a = 0
    while isinstance(t, tuple):
        a += 1
        t = t[0]
    return a


def _map_table(t, inv, out_map, arity, n):
    def get(idx):
        v = t
        for i in idx:
            v = v[inv[i]]
        return out_map[v] if out_map is not None else v
    def build(prefix, depth):
        if depth == arity:
            return get(prefix)
        return tuple(build(prefix + (i,), depth + 1) for i in range(n))
    return build((), 0)


def isomorphic(m1: FiniteModel, m2: FiniteModel):
    """A bijection perm with m1.permuted(perm) == m2, or None."""
    if m1.signature() != m2.signature():
        raise ModelError("signature mismatch")
    if m1.size != m2.size:
        return None
    target = m2.encode()
    for perm in permutations(range(m1.size)):
        if all(perm[m1.constants[k]] == m2.constants[k] for k in m1.constants):
            if m1.permuted(perm).encode() == target:
                return perm
    return None


# ---------------------------------------------------------------------------
# compact single-line serialization

def serialize_model(m: FiniteModel) -> str:
    parts = [str(m.size)]
    for k, v in m.constants.items():
        parts.append("fun/0 %s = %d" % (k, v))
    for k, t in m.fun_tables.items():
        parts.append("fun/%d %s = %s" % (_arity(t), k,
                                         ",".join(str(v) for v in _flat(t))))
    for k, t in m.rel_tables.items():
        parts.append("rel/%d %s = %s" % (_arity(t), k,
                                         ",".join(str(int(v)) for v in _flat(t))))
    return " ; ".join(parts)


def deserialize_model(line: str) -> FiniteModel:
    parts = [p.strip() for p in line.strip().split(";")]
    n = int(parts[0])
    consts, funs, rels = {}, {}, {}
    for p in parts[1:]:
        if not p:
            continue
        head, _, values = p.partition(" = ")
        kind_arity, name = head.split()
        kind, arity = kind_arity.split("/")
        arity = int(arity)
        vals = [int(v) for v in values.split(",")] if values.strip() else []
        if kind == "fun" and arity == 0:
            consts[name] = vals[0]
        elif kind == "fun":
            funs[name] = _unflatten(vals, arity, n)
        elif kind == "rel":
            rels[name] = _unflatten([bool(v) for v in vals], arity, n)
        else:
            raise ModelError("bad model field %r" % p)
    return FiniteModel(n, consts, funs, rels)


def _unflatten(vals, arity, n):
    if len(vals) != n ** arity:
        raise ModelError("table length %d, expected %d" % (len(vals), n ** arity))
    it = iter(vals)
    def build(depth):
        if depth == arity:
            return next(it)
        return tuple(build(depth + 1) for _ in range(n))
    return build(0)

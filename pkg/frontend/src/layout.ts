// Tree-literal parsing, pane geometry, and the pebble-distance arithmetic
// that the service uses when it annotates Spoiler candidates.  Everything in
// this module is pure and DOM-free so the renderer and the tests share it.

export interface TreeShape {
  size: number;
  colours: number[];
  parents: (number | null)[];
  children: number[][];
  depths: number[];
  lasso: { attach: number; period: number[] } | null;
}

export class LiteralSyntaxError extends Error {
  readonly at: number;

  constructor(message: string, at: number) {
    super(`${message} (at offset ${at})`);
    this.name = "LiteralSyntaxError";
    this.at = at;
  }
}

// Grammar: a node is `c<digits>`, optionally followed by `@[c.,c.,...]`
// (colour period of an infinite tail hanging below a leaf; at most one per
// tree) and/or a parenthesised child list.  Nodes are numbered in the order
// they appear, so ids agree with the service's numbering for the same
// literal.  The walk is iterative: pasted literals can be thousands of
// levels deep.
export function parseTreeLiteral(text: string): TreeShape {
  let i = 0;
  const colours: number[] = [];
  const parents: (number | null)[] = [];
  const children: number[][] = [];
  const depths: number[] = [];
  let lasso: { attach: number; period: number[] } | null = null;

  const skipWs = () => {
    while (i < text.length && /\s/.test(text[i])) i += 1;
  };
  const parseColour = (): number => {
    skipWs();
    if (i >= text.length || text[i] !== "c") {
      throw new LiteralSyntaxError("expected colour 'c<digits>'", i);
    }
    let j = i + 1;
    while (j < text.length && text[j] >= "0" && text[j] <= "9") j += 1;
    if (j === i + 1) {
      throw new LiteralSyntaxError("expected digits after 'c'", i + 1);
    }
    const value = parseInt(text.slice(i + 1, j), 10);
    i = j;
    return value;
  };

  const open: number[] = []; // nodes whose child list is still unclosed
  let expectNode = true;
  for (;;) {
    if (expectNode) {
      const parent = open.length ? open[open.length - 1] : null;
      const colour = parseColour();
      const node = colours.length;
      colours.push(colour);
      parents.push(parent);
      children.push([]);
      depths.push(parent === null ? 0 : depths[parent] + 1);
      if (parent !== null) children[parent].push(node);
      skipWs();
      let lassoHere = false;
      if (i < text.length && text[i] === "@") {
        i += 1;
        if (i >= text.length || text[i] !== "[") {
          throw new LiteralSyntaxError("expected '[' after '@'", i);
        }
        i += 1;
        const period: number[] = [];
        for (;;) {
          period.push(parseColour());
          skipWs();
          if (i < text.length && text[i] === ",") {
            i += 1;
            continue;
          }
          if (i < text.length && text[i] === "]") {
            i += 1;
            break;
          }
          throw new LiteralSyntaxError("expected ',' or ']' in lasso period", i);
        }
        if (lasso !== null) {
          throw new LiteralSyntaxError("a tree may carry at most one lasso", i);
        }
        lasso = { attach: node, period };
        lassoHere = true;
        skipWs();
      }
      if (i < text.length && text[i] === "(") {
        if (lassoHere) {
          throw new LiteralSyntaxError("lasso is only allowed on a leaf", i);
        }
        i += 1;
        open.push(node);
        // stay in node mode: the first child follows
      } else {
        expectNode = false;
      }
    } else {
      if (!open.length) break;
      skipWs();
      if (i < text.length && text[i] === ",") {
        i += 1;
        expectNode = true;
      } else if (i < text.length && text[i] === ")") {
        i += 1;
        open.pop();
      } else {
        throw new LiteralSyntaxError("expected ',' or ')' in child list", i);
      }
    }
  }
  skipWs();
  if (i !== text.length) {
    throw new LiteralSyntaxError("trailing input after tree literal", i);
  }
  return { size: colours.length, colours, parents, children, depths, lasso };
}

// --- metrics --------------------------------------------------------------

export function lowestCommonAncestor(shape: TreeShape, a: number, b: number): number {
  let x = a;
  let y = b;
  while (x !== y) {
    if (shape.depths[x] >= shape.depths[y]) {
      x = shape.parents[x]!;
    } else {
      y = shape.parents[y]!;
    }
  }
  return x;
}

export function distance(shape: TreeShape, a: number, b: number): number {
  const w = lowestCommonAncestor(shape, a, b);
  return shape.depths[a] + shape.depths[b] - 2 * shape.depths[w];
}

// --- strategy arithmetic ----------------------------------------------------
//
// The service annotates each Spoiler candidate with the pairs it is "close"
// to and the pairs it "threatens".  Both flags are plain arithmetic over the
// board state, so the overlay recomputes them locally: M is the tether unit,
// D the depth-marker period, D0 the extent of exact depth markers.

export interface ScaleParams {
  k: number;
  M: number;
  D: number;
  D0: number;
}

export const SURROGATE_SCALES: Record<number, ScaleParams> = {
  1: { k: 1, M: 3, D: 12, D0: 48 },
  2: { k: 2, M: 9, D: 36, D0: 144 },
  3: { k: 3, M: 27, D: 108, D0: 216 },
};

export function standardScale(k: number): ScaleParams {
  const M = 3 ** (k + 2);
  return { k, M, D: 4 * M, D0: 100 * M };
}

export function scaleFor(preset: string, k: number): ScaleParams | null {
  if (preset === "surrogate") return SURROGATE_SCALES[k] ?? null;
  if (preset === "paper") return standardScale(k);
  return null;
}

// residue of value mod modulus shifted into (-modulus/2, modulus/2]
export function centeredResidue(value: number, modulus: number): number {
  if (modulus <= 0) throw new RangeError(`modulus must be positive, got ${modulus}`);
  let z = ((value % modulus) + modulus) % modulus; // JS % keeps the sign (and -0)
  if (z > modulus / 2) z -= modulus;
  return z;
}

export function closeThreshold(scale: ScaleParams, i: number, j: number): number {
  return Math.floor((2 * scale.M) / 3 ** Math.max(i, j));
}

// The pair list the flags are indexed against: the fixed root pair first,
// then the played rounds in order.
export function hintPairs(played: number[][]): number[][] {
  return [[0, 0], ...played];
}

export function closeList(
  shape: TreeShape,
  node: number,
  pairs: number[][],
  side: 0 | 1,
  scale: ScaleParams,
): number[] {
  const sNext = pairs.length;
  const out: number[] = [];
  pairs.forEach((pair, i) => {
    if (distance(shape, node, pair[side]) <= closeThreshold(scale, i, sNext)) {
      out.push(i);
    }
  });
  return out;
}

export function threatList(
  shape: TreeShape,
  node: number,
  pairs: number[][],
  side: 0 | 1,
  anchors: boolean[],
  scale: ScaleParams,
): number[] {
  const sNext = pairs.length;
  const out: number[] = [];
  pairs.forEach((pair, i) => {
    const drift = centeredResidue(
      shape.depths[node] - shape.depths[pair[side]],
      scale.D,
    );
    if (anchors[i] && Math.abs(drift) <= closeThreshold(scale, i, sNext)) {
      out.push(i);
    }
  });
  return out;
}

// Depth marker a node would carry in the enhanced colouring: exact up to D0,
// a centered residue mod D beyond.  Display-only.
export function depthMarker(depth: number, scale: ScaleParams): string {
  if (depth <= scale.D0) return `d=${depth}`;
  return `d≡${centeredResidue(depth, scale.D)} (mod ${scale.D})`;
}

// --- pane geometry ----------------------------------------------------------

export interface NodePos {
  x: number;
  y: number;
}

// Depth-aligned tidy layout: every node sits on the row of its depth, leaves
// take consecutive columns left to right, inner nodes centre over their
// children.  Unitless grid coordinates; the renderer applies spacing.
export function layoutTree(shape: TreeShape): NodePos[] {
  const pos: NodePos[] = shape.depths.map((d) => ({ x: 0, y: d }));
  // preorder with children left to right, iteratively (deep paths)
  const order: number[] = [];
  const stack = [0];
  while (stack.length) {
    const v = stack.pop()!;
    order.push(v);
    const kids = shape.children[v];
    for (let i = kids.length - 1; i >= 0; i -= 1) stack.push(kids[i]);
  }
  let nextLeaf = 0;
  for (const v of order) {
    if (!shape.children[v].length) {
      pos[v].x = nextLeaf;
      nextLeaf += 1;
    }
  }
  for (let idx = order.length - 1; idx >= 0; idx -= 1) {
    const v = order[idx];
    const kids = shape.children[v];
    if (kids.length) {
      let sum = 0;
      for (const c of kids) sum += pos[c].x;
      pos[v].x = sum / kids.length;
    }
  }
  return pos;
}

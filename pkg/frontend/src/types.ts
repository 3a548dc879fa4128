import { z } from "zod";

/** Blank-card JSON: {exact} | {lo,hi} | {lo} | {hi} | {} */
export const CardJson = z
  .object({
    exact: z.number().int().nonnegative().optional(),
    lo: z.number().int().nonnegative().optional(),
    hi: z.number().int().nonnegative().optional(),
  })
  .refine((c) => !(c.exact !== undefined && (c.lo !== undefined || c.hi !== undefined)), {
    message: "exact excludes bounds",
  })
  .refine((c) => c.lo === undefined || c.hi === undefined || c.lo <= c.hi, {
    message: "lo must not exceed hi",
  });

export type CardJson = z.infer<typeof CardJson>;

export const PreferenceJson = z.object({
  node: z.string(),
  levels: z.array(z.array(z.string()).nonempty()),
  cards: z.array(CardJson),
  scale: z.enum(["ratio", "interval"]).default("ratio"),
  intensity: z.enum(["cardinal", "difference_ordinal", "ratio_ordinal"]).default("cardinal"),
});

export type PreferenceJson = z.infer<typeof PreferenceJson>;

export interface RunMeta {
  run: string;
  kind: string;
  status: string;
  stale?: boolean;
  error?: string;
}

export interface SmaaNodeReport {
  node: string;
  alternatives: string[];
  rai: number[][];
  pwi: number[][];
  expected_rank: Record<string, number>;
  expected_order: string[];
  barycenter_order: string[];
}

export interface RorResult {
  node: string;
  alternatives: string[];
  necessary: number[][];
  possible: number[][];
}

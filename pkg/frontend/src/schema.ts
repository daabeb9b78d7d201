import { z } from "zod";

import { ValidationError } from "./errors.js";

// Mirror of the simulator's report.json writer; eta bounds allow the
// writer's 1e-9 rounding slack.
const reportEntrySchema = z.object({
  input: z.number().int().min(1),
  subcarrier: z.number().int().min(1),
  frequency_hz: z.number().positive(),
  target_angle_deg: z.number().nullable(),
  peak_gain_db: z.number(),
  peak_directivity_db: z.number(),
  peak_angle_deg: z.number(),
  eta1: z.number().min(0).max(1 + 1e-9),
  eta2: z.number().min(0).max(1 + 1e-9),
  p_rad_w: z.number().min(0),
  p_load_loss_w: z.number().min(0),
  p_source_loss_w: z.number().min(0),
  p_delivered_w: z.number().min(0),
});

const reportSchema = z.object({
  na: z.number().int().min(1),
  k_count: z.number().int().min(1),
  n_elements: z.number().int().min(1),
  frequencies_hz: z.array(z.number().positive()),
  aperture_baseline_db: z.number().nullable(),
  config_fingerprint: z.string().nullable(),
  entries: z.array(reportEntrySchema),
});

export type ReportEntry = z.infer<typeof reportEntrySchema>;
export type Report = z.infer<typeof reportSchema>;

export function parseReport(text: string): Report {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new ValidationError(`report is not valid JSON: ${(err as Error).message}`);
  }
  const result = reportSchema.safeParse(doc);
  if (!result.success) {
    const first = result.error.issues[0];
    const where = first.path.length ? first.path.join(".") : "(root)";
    throw new ValidationError(`report schema: ${where}: ${first.message}`);
  }
  return result.data;
}

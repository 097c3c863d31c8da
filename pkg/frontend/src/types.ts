/** Response/request bodies of the assessment service, field-for-field. */

export interface SegmentOut {
  label_id: number;
  label_name: string;
  start_frame: number;
  end_frame: number;
  mean_confidence: number;
  flagged_low_confidence: boolean;
  subclip_uri: string | null;
}

export interface StatusEvent {
  status: string;
  at: string;
}

export interface SessionOut {
  session_id: string;
  patient_id: string;
  upload_time: string;
  status: string;
  report_id: string | null;
  error: string | null;
  segments: SegmentOut[];
  status_history: StatusEvent[];
}

export interface ActionReportOut {
  segment_id: string;
  action_id: number;
  text: string;
  failed: boolean;
  failure_reason: string;
}

export interface ReportOut {
  report_id: string;
  session_id: string;
  created_at: string;
  final_summary: string;
  actions: ActionReportOut[];
  model_fingerprint: string;
  llm_calls: number;
  prompt_tokens: number;
  latency_s: number;
}

export interface FeedbackIn {
  accuracy: number;
  completeness: number;
  practicability: number;
  safety: number;
  language_quality: number;
  free_text: string;
}

export interface FeedbackOut extends FeedbackIn {
  feedback_id: number;
  report_id: string;
  nurse_id: string;
  created_at: string;
}

export interface PatientAdherenceOut {
  patient_id: string;
  sessions: number;
  enrolled_days: number;
  frequency: number;
}

export interface AdherenceOut {
  as_of: string;
  avg_sessions: number;
  avg_frequency: number;
  per_patient: PatientAdherenceOut[];
}

export interface UploadAccepted {
  session_id: string;
  status: string;
  deduplicated: boolean;
}

export interface ReminderOptInOut {
  patient_id: string;
  reminder_opt_in: boolean;
}
